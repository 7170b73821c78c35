#pragma once

#include <stdexcept>
#include <string>

namespace newscheck {

/// Base for every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or missing input data (files, records, corpora).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Missing resource or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Caller-supplied values violate an operation's preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Persisted data failed integrity or version checks.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace newscheck
