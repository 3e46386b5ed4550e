#pragma once

#include <stdexcept>
#include <string>

namespace blockopt {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or configuration (bad bounds, unknown keys, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed (degenerate sample, factorization, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace blockopt
