#pragma once

#include <stdexcept>
#include <string>

namespace trapion {

/// Base for all numerical failures raised by the library.
/// The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pulse-area trapping condition requested at a coupling zero.
class DegenerateCoupling : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NoZeros : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonConvergent : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Probability transported past the Fock cutoff exceeded the tolerance.
class LeakExceeded : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A sampled recoil needed quantum numbers beyond the cutoff.
class TruncationHit : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class EmptyDistribution : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace trapion
