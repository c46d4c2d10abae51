#pragma once

#include <stdexcept>
#include <string>

namespace scatlab {

// Raised when a caller violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a computation cannot complete on valid input
// (singular matrix, failed embedding, unreadable file ...).
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scatlab
