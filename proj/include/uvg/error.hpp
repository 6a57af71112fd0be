#pragma once

#include <stdexcept>
#include <string>

namespace uvg {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (range, shape, timestep).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An operation was called in the wrong state (double rescale, backward
/// without a recorded forward pass).
class StateError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, degenerate schedules, non-PSD matrices.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A file the command depends on (checkpoint, fixture) is missing or unreadable.
class MissingArtifact : public Error {
 public:
  using Error::Error;
};

}  // namespace uvg
