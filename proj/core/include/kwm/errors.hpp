#pragma once

#include <stdexcept>
#include <string>

namespace kwm {

/// Input violates a precondition (bad shape, out-of-range element, asymmetric matrix, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (eigensolver non-convergence, factorization failure).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The request is well-formed but outside what the library can represent.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kwm
