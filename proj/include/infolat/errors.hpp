#pragma once

#include <stdexcept>
#include <string>

namespace infolat {

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Base for failures of the numerical pipeline (as opposed to bad input).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A covariance matrix whose symplectic spectrum leaves [0, 1].
class InvalidCovarianceError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Zero modes were found while the caller asked for a unique ground state.
class DegenerateGroundStateError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace infolat
