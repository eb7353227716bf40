// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace mimosim {

/// Operand shapes do not conform (vector/matrix/tensor kernels, channel assembly).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numeric argument lies outside the domain of the function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid configuration: unknown identifiers, bad files, empty grids.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-side contract was violated (e.g. unsorted input where sorted is required).
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Missing key in a lookup table.
class LookupError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

}  // namespace mimosim
