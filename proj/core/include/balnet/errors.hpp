#pragma once

#include <stdexcept>
#include <string>

namespace balnet {

// Root of every exception the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data is malformed or violates a data invariant (bad rows, missing
// history, empty universes).
class DataError : public Error {
 public:
  using Error::Error;
};

// A statistic is undefined for the given input (zero variance, empty graph,
// degenerate eigenvalues) or an argument is outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Filesystem failures: unreadable inputs, unwritable outputs.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace balnet
