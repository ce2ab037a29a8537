#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace synthcoupling {

/// Invalid parameters, malformed configuration, or a violated precondition.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operands live on incompatible Hilbert spaces.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The parametric drive reached or exceeded the instability threshold |lambda| >= delta_c.
class InstabilityError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Anything that goes wrong while computing: integrator failure, loss of
/// positivity, degenerate steady state, insufficient Fock cutoff.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CutoffError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct Warning {
    std::string code;
    std::string message;
    double value = 0.0;
};

using Warnings = std::vector<Warning>;

inline void warn(Warnings* sink, std::string code, std::string message, double value = 0.0)
{
    if (sink)
        sink->push_back({std::move(code), std::move(message), value});
}

} // namespace synthcoupling
