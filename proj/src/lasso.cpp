#include "sparsedens/solvers.hpp"

#include <cmath>
#include <vector>

namespace sparsedens {
namespace {

double soft(double z, double threshold) {
  if (z > threshold) return z - threshold;
  if (z < -threshold) return z + threshold;
  return 0.0;
}

}  // namespace

double lasso_objective(const DantzigProblem& problem, const Eigen::VectorXd& lambda) {
  return lambda.dot(problem.gram.matrix() * lambda) - 2.0 * problem.beta_hat.dot(lambda) +
         2.0 * problem.eta.dot(lambda.cwiseAbs());
}

double lasso_kkt_residual(const DantzigProblem& problem, const Eigen::VectorXd& lambda, double support_tol) {
  const Eigen::VectorXd grad = problem.gram.matrix() * lambda - problem.beta_hat;
  double worst = 0.0;
  for (Eigen::Index m = 0; m < lambda.size(); ++m) {
    if (std::abs(lambda[m]) > support_tol)
      worst = std::max(worst, std::abs(grad[m] + std::copysign(problem.eta[m], lambda[m])));
    else
      worst = std::max(worst, std::abs(grad[m]) - problem.eta[m]);
  }
  return worst;
}

SolveResult lasso_solve(const DantzigProblem& problem, const SolverOptions& options) {
  problem.validate();
  const Eigen::MatrixXd& G = problem.gram.matrix();
  const Eigen::Index M = G.rows();
  for (Eigen::Index m = 0; m < M; ++m)
    if (!(G(m, m) > 0.0)) throw std::invalid_argument("lasso_solve needs a positive diagonal");

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(M);
  Eigen::VectorXd grad = -problem.beta_hat;  // G lambda - beta_hat

  auto update = [&](Eigen::Index m) {
    const double diag = G(m, m);
    const double next = soft(lambda[m] - grad[m] / diag, problem.eta[m] / diag);
    const double delta = next - lambda[m];
    if (delta != 0.0) {
      grad.noalias() += G.col(m) * delta;
      lambda[m] = next;
    }
    return std::abs(delta);
  };

  std::size_t sweeps = 0;
  bool converged = false;
  double kkt = 0.0;
  std::vector<Eigen::Index> active;
  while (sweeps < options.lasso_max_sweeps) {
    double change = 0.0;
    for (Eigen::Index m = 0; m < M; ++m) change = std::max(change, update(m));
    ++sweeps;

    if (change < options.lasso_change_tol) {
      grad = G * lambda - problem.beta_hat;  // drop accumulated drift
      kkt = lasso_kkt_residual(problem, lambda, 0.0);
      if (kkt < options.lasso_kkt_tol) {
        converged = true;
        break;
      }
    }

    active.clear();
    for (Eigen::Index m = 0; m < M; ++m)
      if (lambda[m] != 0.0) active.push_back(m);
    while (sweeps < options.lasso_max_sweeps) {
      double inner = 0.0;
      for (auto m : active) inner = std::max(inner, update(m));
      ++sweeps;
      if (inner < options.lasso_change_tol) break;
    }
  }

  SolveResult result;
  result.coefficients = CoefficientVector::from_values(lambda, Method::Lasso, options.support_tol);
  auto& rep = result.report;
  rep.iterations = sweeps;
  rep.objective = lasso_objective(problem, result.coefficients.values);
  rep.duality_gap_or_kkt_residual = lasso_kkt_residual(problem, result.coefficients.values, options.support_tol);
  rep.max_constraint_violation = dantzig_violation(problem, result.coefficients.values);
  rep.status = converged ? SolverStatus::Optimal : SolverStatus::MaxIter;
  return result;
}

}  // namespace sparsedens
