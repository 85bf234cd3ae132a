#pragma once

#include <stdexcept>
#include <string>

namespace vela {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arrays or fields with incompatible shapes or grids.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Parameter outside its admissible range.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A user-supplied function returned a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Singular or ill-conditioned matrix inversion.
class InversionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Requested feature is not supported by this build or model.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Input that makes a diagnostic meaningless (e.g. zero norms everywhere).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared during time stepping.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double t) : Error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace vela
