#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace dmt {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (t outside [0,1], N_p < 2, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Requested size exceeds a configured limit.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Input violates a structural precondition (duplicate nodes, empty maps, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Linear system is singular or too ill-conditioned to be trusted.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}

  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

// Well-formed input that breaks a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class UnsupportedVersionError : public Error {
 public:
  using Error::Error;
};

// Optimization produced a non-finite loss or gradient.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : Error(what), iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace dmt
