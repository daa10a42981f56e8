#pragma once

#include "sparsedens/gram.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace sparsedens {

enum class Method { Dantzig, Lasso, DantzigNonAdaptive, DantzigLS, SoftThreshold };

std::string_view to_string(Method method);
/// Accepts dantzig, lasso, dantzig-na, dantzig-ls, soft-threshold.
Method parse_method(std::string_view name);

/// min ||lambda||_1 subject to |(G lambda)_m - beta_hat_m| <= eta_m for all m.
struct DantzigProblem {
  GramMatrix gram;
  Eigen::VectorXd beta_hat;
  Eigen::VectorXd eta;

  /// Throws std::invalid_argument on dimension mismatch or non-positive eta.
  void validate() const;
};

struct CoefficientVector {
  Eigen::VectorXd values;
  std::vector<std::size_t> support;  // indices with |lambda_m| > support tolerance
  double l1_norm = 0.0;
  Method method = Method::Dantzig;

  /// Entries with magnitude at or below support_tol are set to exactly zero.
  static CoefficientVector from_values(Eigen::VectorXd values, Method method, double support_tol = 1e-12);
};

enum class SolverStatus { Optimal, MaxIter, Infeasible };
std::string_view to_string(SolverStatus status);

struct SolverReport {
  std::size_t iterations = 0;
  double max_constraint_violation = 0.0;  // max_m (|(G lambda - beta_hat)_m| - eta_m)_+
  double objective = 0.0;
  SolverStatus status = SolverStatus::Optimal;
  /// Dantzig: primal minus dual objective of the certificate. Lasso: KKT residual.
  double duality_gap_or_kkt_residual = 0.0;
};

struct SolverOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  std::size_t max_iterations = 200000;
  /// Consecutive non-improving simplex pivots before switching to Bland's rule.
  std::size_t degenerate_pivots_before_bland = 50;
  /// Start the simplex in Bland's rule right away.
  bool bland_only = false;
  double lasso_change_tol = 1e-10;
  double lasso_kkt_tol = 1e-9;
  std::size_t lasso_max_sweeps = 100000;
  double support_tol = 1e-12;
};

struct SolveResult {
  CoefficientVector coefficients;
  SolverReport report;
  /// Dantzig: dual certificate u with |G u|_inf <= 1 and objective
  /// beta_hat.u - eta.|u|. Empty for other solvers.
  Eigen::VectorXd dual;
};

/// Dantzig program solved as an LP by a bounded dual simplex.
///
/// The LP uses split variables lambda = lambda+ - lambda- and residuals
/// r = G lambda - beta_hat boxed in [-eta, eta]. The all-residual basis at
/// lambda = 0 is dual feasible, so the dual simplex starts there and each
/// pivot either adds a coordinate to the support or releases a constraint.
/// A basis is kept as (S, T): basic coefficients S and residual rows T held
/// at a bound, with G(T, S) square and nonsingular.
SolveResult dantzig_solve(const DantzigProblem& problem, const SolverOptions& options = {});

/// min lambda' G lambda - 2 beta_hat' lambda + 2 sum_m eta_m |lambda_m| by
/// cyclic coordinate descent with an active-set inner loop.
SolveResult lasso_solve(const DantzigProblem& problem, const SolverOptions& options = {});

/// Least-squares refit on a support: solves G_JJ lambda_J = beta_hat_J and
/// zeroes the rest. Throws SolverError carrying the condition number when
/// G_JJ is singular or its condition number exceeds max_condition.
CoefficientVector two_step_refit(const GramMatrix& gram, const Eigen::VectorXd& beta_hat,
                                 std::span<const std::size_t> support, double max_condition = 1e12);

/// sign(beta_hat_m) (|beta_hat_m| - eta_m)_+, the solution of both programs when G = I.
CoefficientVector soft_threshold_estimate(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& eta);

/// max_m (|(G lambda - beta_hat)_m| - eta_m)_+
double dantzig_violation(const DantzigProblem& problem, const Eigen::VectorXd& lambda);

/// Lasso objective lambda' G lambda - 2 beta_hat' lambda + 2 sum eta |lambda|.
double lasso_objective(const DantzigProblem& problem, const Eigen::VectorXd& lambda);

/// Largest violation of the Lasso first-order conditions.
double lasso_kkt_residual(const DantzigProblem& problem, const Eigen::VectorXd& lambda, double support_tol = 1e-12);

}  // namespace sparsedens
