// SPDX-License-Identifier: Apache-2.0
#include "mimosim/cli.hpp"

int main(int argc, char** argv) { return mimosim::cli_dispatch(argc, argv); }
