#pragma once

#include <stdexcept>
#include <string>

namespace vsclab {

/// Dimension or shape mismatch between a vector and the space it claims to live in.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed configuration, out-of-range parameter or invalid user-supplied function.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solve did not produce a certified result.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sampled distance profile violates monotonicity/convexity beyond the repair threshold.
class ProfileInvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A query falls outside the range covered by a profile. Never extrapolated.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// The equation A x = y has no solution (or none was found to tolerance).
class AssumptionViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vsclab
