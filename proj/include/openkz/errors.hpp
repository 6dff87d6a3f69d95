#pragma once

#include <stdexcept>
#include <string>

namespace openkz {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (e.g. momentum outside the BZ).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operation requested at a gapless point where it is undefined.
class SingularPointError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of the operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Inputs with inconsistent shapes (e.g. trajectories sampled on different grids).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Adaptive step size collapsed during integration.
class StiffnessError : public Error {
 public:
  StiffnessError(const std::string& what, double t) : Error(what), time_(t) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace openkz
