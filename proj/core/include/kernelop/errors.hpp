#pragma once

#include <stdexcept>
#include <string>

namespace kernelop {

/// Mismatched array/point dimensions between arguments.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A request beyond what the object was constructed to support
/// (e.g. a derivative order above the configured table size).
class CapabilityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid construction parameters or experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure (factorization breakdown, undefined metric, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace kernelop
