#pragma once

#include <stdexcept>
#include <string>

namespace ftecdi {

/// Invalid configuration or parameter values. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure: non-converged root find, Newton divergence, dt underflow.
/// Maps to CLI exit code 3.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what, double last_residual = 0.0)
        : std::runtime_error(what), last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// Argument outside the mathematical domain of a closure (e.g. c <= 0).
class DomainError : public SolverError {
public:
    using SolverError::SolverError;
};

/// File read/write failure. Maps to CLI exit code 4.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ftecdi
