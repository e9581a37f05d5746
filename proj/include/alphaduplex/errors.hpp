// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace alphaduplex {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Bad configuration: unsupported layout, malformed config file, bad CLI value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Quadrature or fit failed to meet its tolerance. Carries the achieved error.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double achieved)
      : Error(what), achieved_error_(achieved) {}
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

class DegreeInsufficient : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Evaluation outside a function's domain (e.g. log of a zero rate).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The constraint set has an empty interior.
class InfeasibleSpec : public Error {
 public:
  using Error::Error;
};

/// A point handed to the barrier is not strictly feasible.
class InfeasiblePoint : public Error {
 public:
  using Error::Error;
};

class LineSearchStall : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace alphaduplex
