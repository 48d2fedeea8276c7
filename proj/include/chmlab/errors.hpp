#pragma once

#include <stdexcept>
#include <string>

namespace chmlab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller violated a structural requirement (grid sizes, mismatched fields).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Iterative numerics failed to converge.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// ODE integration stopped early; last_valid_s is the furthest accepted arclength.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double last_valid_s)
        : std::runtime_error(what), last_valid_s_(last_valid_s) {}

    double last_valid_s() const noexcept { return last_valid_s_; }

private:
    double last_valid_s_;
};

}  // namespace chmlab
