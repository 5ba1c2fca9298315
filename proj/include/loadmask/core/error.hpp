#pragma once

#include <stdexcept>
#include <string>

namespace loadmask {

/// Bad input: configuration, file contents, arguments. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite loss, diverging training and similar runtime failures. Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace loadmask
