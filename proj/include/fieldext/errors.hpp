#pragma once

#include <stdexcept>
#include <string>

namespace fieldext {

/// Invalid user-facing configuration (grid sizes, J/N bounds, h <= 0, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Caller broke an API precondition, e.g. mixing fields from different grids.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Numerical failure: eigensolver non-convergence, residual checks, symmetry checks.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual = 0.0)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace fieldext
