#pragma once

#include <stdexcept>
#include <string>

namespace ptbands {

// Exit codes follow the category: config 1, assumption 2, solver 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 1; }
};

/// Raised when a spectral hypothesis (reality, isolation, simplicity, sign
/// condition) needed by a downstream computation does not hold.
class AssumptionError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Numerical failure: non-convergence, singular systems, rejected inputs to
/// a solver.
class SolverError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

}  // namespace ptbands
