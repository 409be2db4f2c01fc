#pragma once

#include <stdexcept>
#include <string>

namespace mfp {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class OutOfBounds : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed file or wire payload.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace mfp
