#pragma once

#include <stdexcept>
#include <string>

namespace gspq {

/// Argument outside the domain of an operation (bad k, T, t, level count, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative method exhausted its budget. Carries the last bracket so the
/// caller can report where it stalled.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double lo, double hi)
        : std::runtime_error(what), lo_(lo), hi_(hi) {}

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

}  // namespace gspq
