#pragma once

#include <stdexcept>
#include <string>

namespace sparsedens {

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A solver could not deliver a certified answer (CLI exit code 3).
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double condition = 0.0)
      : Error(what), condition_(condition) {}
  /// Condition estimate of the offending system, 0 when not applicable.
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// Exhaustive enumeration would exceed its subset budget (CLI exit code 4).
class BudgetError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

}  // namespace sparsedens
