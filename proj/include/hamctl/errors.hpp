#pragma once

#include <stdexcept>
#include <string>

namespace hamctl {

/// Malformed input: dimension or kind mismatch, violated constraints.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A hypothesis required by an inversion or bound does not hold.
struct PreconditionError : ValidationError {
    using ValidationError::ValidationError;
};

/// A series could not be certified within the order budget.
struct TailFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iteration or integration failed to reach its tolerance.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Spectral classes merged while iterating a time-dependent transformation.
struct SpectralCollapse : ConvergenceError {
    using ConvergenceError::ConvergenceError;
};

} // namespace hamctl
