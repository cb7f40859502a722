// errors.hpp — exception hierarchy shared by every lioueps module.
//
// DomainError: the caller handed us something outside an operation's
// contract (negative rate, non-Hermitian H, mismatched spaces).
// NumericalError: the input was valid but the numerics could not deliver
// (no EP in the bracket, rank mismatch, defective mode expansion).

#pragma once

#include <stdexcept>
#include <string>

namespace lioueps {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace lioueps
