// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mimosim/antenna.hpp"
#include "mimosim/bench.hpp"
#include "mimosim/calibration.hpp"
#include "mimosim/errors.hpp"
#include "mimosim/ftr.hpp"
#include "mimosim/link_sim.hpp"
#include "mimosim/parallel.hpp"
#include "mimosim/propagation.hpp"
#include "mimosim/reference_channel.hpp"
#include "mimosim/rng.hpp"
#include "mimosim/stats.hpp"
#include "mimosim/tensor.hpp"
#include "mimosim/types.hpp"
