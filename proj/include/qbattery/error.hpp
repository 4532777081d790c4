#pragma once

#include <stdexcept>
#include <string>

namespace qbattery {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configurable resource guard (matrix dimension, memory) was exceeded.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed (eigensolver did not converge, NaN produced).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing an artifact or config file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qbattery
