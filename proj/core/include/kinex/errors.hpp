#pragma once

#include <stdexcept>
#include <string>

namespace kinex {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-facing configuration (grid sizes, unknown ids, bad flags).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation
/// (non-positive temperature, non-positive-definite covariance, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A state that violates a required invariant, e.g. negative densities
/// handed to an entropy evaluation.
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: instability, singular solves, eigen-solver breakdown.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Density below the quadrature floor; moments are undefined.
class DegenerateDensityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A stage produced values below the positivity tolerance.
class PositivityViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Time step larger than the positivity-preserving CFL bound.
class CflViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A user-supplied component broke its documented contract.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace kinex
