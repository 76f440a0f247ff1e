#pragma once

#include <stdexcept>
#include <string>

namespace loopsoup {

// Exit codes used by the command-line tool: 1 = config, 2 = guard, 3 = runtime.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 3; }
};

/// Invalid parameters or configuration (negative kappa, unknown config keys, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 1; }
};

/// A size or state-space guard refused the request (enumerator limits, subset counts, budgets).
class GuardError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Numerical or runtime failure (step cap, singular system, IO).
class RuntimeError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

}  // namespace loopsoup
