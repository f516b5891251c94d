#pragma once

#include <stdexcept>
#include <string>

namespace cagesim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value. `field()` names the offending key when known.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message, std::string field = {})
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Eccentricity large enough for the rotor to touch the stator bore.
class RotorContactError : public Error {
 public:
  using Error::Error;
};

/// Phase, loop or bar index outside its valid range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// A fault layout the selected model cannot represent.
class UnsupportedConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Singular or badly conditioned inductance system.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

/// Adaptive step size collapsed below its floor.
class StiffFailureError : public Error {
 public:
  using Error::Error;
};

/// Signal window unusable for spectral analysis.
class WindowError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cagesim
