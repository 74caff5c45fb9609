#pragma once

#include <stdexcept>
#include <string>

namespace lds {

// Caller supplied arguments that violate an operation's preconditions.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An observation symbol or line number outside 1..n.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Malformed or unreadable input data (CSV rows, model files, I/O).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Too few fixations survive cleaning to estimate a region.
class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

// Likelihood collapsed to zero or a result went non-finite.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lds
