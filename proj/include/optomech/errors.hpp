#pragma once

#include <stdexcept>
#include <string>

namespace optomech {

/// Base of every error thrown by the library. `kind()` is a stable
/// machine-readable tag used by the CLI when reporting failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

struct PreconditionError : Error {
  explicit PreconditionError(const std::string& what) : Error("precondition", what) {}
};

struct GaugeError : Error {
  explicit GaugeError(const std::string& what) : Error("gauge", what) {}
};

struct NumericalError : Error {
  explicit NumericalError(const std::string& what, double condition = 0.0)
      : Error("numerical", what), condition_(condition) {}
  /// Reciprocal condition estimate of the failing solve, when one exists.
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

struct SolverFailure : Error {
  SolverFailure(const std::string& what, double residual)
      : Error("solver_failure", what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

struct DivergenceError : Error {
  explicit DivergenceError(const std::string& what) : Error("divergence", what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace optomech
