#pragma once

#include <stdexcept>
#include <string>

namespace uforge {

/// Base for every error raised by the library. The CLI maps subclasses to
/// exit codes and diagnostics.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Loss exceeded the divergence guard during training or unlearning.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class HashMismatchError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// A file the operation depends on does not exist or cannot be read.
class MissingArtifactError : public Error {
 public:
  using Error::Error;
};

}  // namespace uforge
