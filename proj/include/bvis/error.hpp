#pragma once

#include <stdexcept>
#include <string>

namespace bvis {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A size or budget limit would be exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// The operation is not defined for the input (e.g. gcd_b(0, 0), P == Q).
class UndefinedInputError : public Error {
 public:
  using Error::Error;
};

/// The input is meaningful but deliberately not handled.
class UnsupportedInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace bvis
