#pragma once

#include <stdexcept>
#include <string>

namespace wsn {

/// Violated precondition on an argument (length mismatch, negative input, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Layout with non-finite or coincident coordinates, or a malformed CSV.
class InvalidLayout : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// State space too large to enumerate exactly.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Graph shape the covariance completion cannot handle (cycles).
class UnsupportedStructure : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure of the measurement model (non-PD covariance, singular block).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wsn
