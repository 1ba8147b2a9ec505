#pragma once

#include <stdexcept>
#include <string>

namespace kaczmarz {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad dimensions, out-of-range parameters, invalid config.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A numerical routine could not produce a trustworthy result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace kaczmarz
