#pragma once

#include <stdexcept>
#include <string>

namespace greenlab {

/// Invalid parameters, mismatched dimensions, unknown tags.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Coefficient field whose symmetric part is not positive definite.
class NonCoerciveError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Source placed on a Dirichlet node, or too close to the boundary.
class SourcePlacementError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Geometric or analytic precondition of a measurement not satisfied.
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Krylov iteration hit its iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

}  // namespace greenlab
