#pragma once

#include <stdexcept>
#include <string>

namespace psyn {

// Failure classes. The CLI maps each class to a distinct exit code.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid parameters (d > p, m < C(p,<=d), bad delta/Delta, ...).
struct ConfigError : Error {
  using Error::Error;
};

/// Malformed or empty input data.
struct InputError : Error {
  using Error::Error;
};

/// File parse failure; message carries line or byte offset.
struct ParseError : InputError {
  using InputError::InputError;
};

/// The reduced space never passed the conditioning gate ("Failure").
struct ConditioningFailure : Error {
  int attempts = 0;
  ConditioningFailure(const std::string& what, int attempts_)
      : Error(what), attempts(attempts_) {}
};

/// Projection requested on a rank-deficient design.
struct ConditioningViolation : Error {
  using Error::Error;
};

/// Iterative method did not converge, or eigensolver failed.
struct NumericError : Error {
  using Error::Error;
};

/// Alternating projections neither converged nor stagnated within the cap.
struct IndeterminateError : NumericError {
  using NumericError::NumericError;
};

/// A density violated a hard invariant (negative mass beyond tolerance).
struct IntegrityError : Error {
  using Error::Error;
};

}  // namespace psyn
