#pragma once

#include <stdexcept>
#include <string>

namespace compacton {

/// Raised when an argument violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by linear solves whose elimination hits a pivot below threshold.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, double pivot)
        : std::runtime_error(what + " (pivot magnitude " + std::to_string(pivot) + ")"),
          pivot_(pivot) {}

    double pivot() const noexcept { return pivot_; }

private:
    double pivot_;
};

/// Raised for parameter values at which a closed form is singular.
class SingularParameter : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace compacton
