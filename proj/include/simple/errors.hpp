#pragma once

#include <stdexcept>
#include <string>

namespace simple {

// Base of every error the library throws. The CLI maps the subclasses to
// distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated a documented precondition (bad flag, i == j, m > n, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Input data or parameters are malformed or inconsistent.
class DataError : public Error {
 public:
  using Error::Error;
};

// A numerical routine failed: non-convergence, singular matrix, failed
// root bracketing.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace simple
