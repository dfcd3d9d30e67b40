#pragma once

#include <stdexcept>
#include <string>

namespace ucplab {

/// Violated precondition on user-supplied parameters.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Two objects that must share a grid (or a dimension) do not.
class DimensionError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// A region that must be covered by the computational grid is not.
class CoverageError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Mathematical domain violation (negative energy where E >= 0 is required, s < 0, ...).
class DomainError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// An iterative method failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace ucplab
