#pragma once

#include <stdexcept>
#include <string>

namespace motobs {

/// Base class for every error raised by the library. Each subclass maps to a
/// fixed process exit code used by the command-line tool.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual int exit_code() const noexcept { return 4; }
};

/// Malformed or invalid configuration, missing files, unreadable CSV.
class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 1; }
};

class TrimError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Detectability or Riccati failures during observer synthesis.
class DesignError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// Runtime numeric failure: NaN, singular mass matrix, roll out of range.
class NumericError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

class DegenerateConfiguration : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace motobs
