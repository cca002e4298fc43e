#pragma once

#include <stdexcept>
#include <string>

namespace reslab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Raised when a truncated series is asked for information beyond what its
// coefficients certify.
class UnreliableTruncationError : public Error {
 public:
  UnreliableTruncationError(const std::string& what, double certified_radius)
      : Error(what), certified_radius_(certified_radius) {}
  double certified_radius() const { return certified_radius_; }

 private:
  double certified_radius_;
};

class BoundaryAmbiguityError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double bound) : Error(what), bound_(bound) {}
  double bound() const { return bound_; }

 private:
  double bound_;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double achieved) : Error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace reslab
