#pragma once

#include <stdexcept>
#include <string>

namespace sllg {

// Invalid or inconsistent configuration. The message names the offending key
// (e.g. "physics.lambda2") so the CLI can surface it directly.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem trouble: unreadable config, unwritable output directory.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed numeric data (NaN/Inf in a field, non-finite increment).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// A time step failed (nonlinear solve did not converge, state blew up).
// Carries where in the trajectory it happened.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& msg, long step, double time)
      : std::runtime_error(msg), step_(step), time_(time) {}
  long step() const { return step_; }
  double time() const { return time_; }

 private:
  long step_;
  double time_;
};

}  // namespace sllg
