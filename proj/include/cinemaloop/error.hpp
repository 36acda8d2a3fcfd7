#pragma once

#include <stdexcept>
#include <string>

namespace cinemaloop {

/// Base class for every error raised by the library. The CLI maps these to
/// exit code 1, the HTTP service to 4xx responses.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad magic number, malformed JSON or an undecodable image.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Payload shorter (or longer) than its header announces.
class LengthError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input whose values violate an invariant (NaN flow, sentinel values...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Precondition violation by the caller: mismatched dimensions, out-of-range parameters.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace cinemaloop
