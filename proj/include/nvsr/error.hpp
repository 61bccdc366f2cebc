#pragma once

#include <stdexcept>
#include <string>

namespace nvsr {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid Hilbert-space dimension or level index.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Operators on mismatched space signatures were combined.
class SignatureError : public Error {
 public:
  using Error::Error;
};

/// A model or run configuration violates an invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Bad run configuration (unknown preset, malformed override, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Requested problem exceeds the memory budget of the chosen backend.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: step-size collapse, non-convergence, singular solve.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Steady-state solve hit a degenerate nullspace.
class MultiplicityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A correlator was requested from a state that is not stationary.
class StationarityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace nvsr
