#pragma once

#include <stdexcept>
#include <string>

namespace hyperklein {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a precondition (dimension mismatch, non-tangent vector, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A point is not on the upper sheet of the hyperboloid.
class InvalidPointError : public Error {
 public:
  using Error::Error;
};

/// A floating-point quantity left its admissible range beyond tolerance.
class NumericValidityError : public Error {
 public:
  using Error::Error;
};

/// A Klein coordinate is too close to the unit sphere to be lifted.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

class DegenerateFrameError : public Error {
 public:
  using Error::Error;
};

/// The ellipsoid shape matrix lost positive definiteness.
class BreakdownError : public Error {
 public:
  BreakdownError(const std::string& what, long iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration) {}

  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

/// An oracle returned something that breaks the first-order oracle contract.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class InstanceConstructionError : public Error {
 public:
  using Error::Error;
};

}  // namespace hyperklein
