#pragma once

#include <stdexcept>
#include <string>

namespace tcmap {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid input data (config, trace, parameters). The CLI maps
/// these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Trace/CSV schema violation; carries the 1-based line number.
class SchemaError : public InputError {
 public:
  SchemaError(const std::string& path, std::size_t line, const std::string& what)
      : InputError(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A model evaluated outside the region where its formula is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Coffin-Manson is undefined for cycles at or below the threshold amplitude.
class AmplitudeBelowThreshold : public DomainError {
 public:
  using DomainError::DomainError;
};

class NoEligibleBin : public Error {
 public:
  using Error::Error;
};

class NoEligibleCore : public Error {
 public:
  using Error::Error;
};

/// Raised when the simulation makes no progress for too long while work remains.
class SimulationStalled : public Error {
 public:
  using Error::Error;
};

}  // namespace tcmap
