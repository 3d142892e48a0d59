#pragma once

#include <stdexcept>
#include <string>

namespace overlapcheck {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid values: bad config fields, broken invariants, mismatched inputs.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed input content (bad JSON, unexpected field types). Messages carry
// the offending line number where one exists.
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Structural inconsistencies such as duplicate ids within a corpus.
class IntegrityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Filesystem failures: missing files, unwritable paths.
class IoError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace overlapcheck
