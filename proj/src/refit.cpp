#include "sparsedens/errors.hpp"
#include "sparsedens/solvers.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>

namespace sparsedens {

CoefficientVector two_step_refit(const GramMatrix& gram, const Eigen::VectorXd& beta_hat,
                                 std::span<const std::size_t> support, double max_condition) {
  const Eigen::Index M = gram.size();
  if (beta_hat.size() != M) throw std::invalid_argument("two_step_refit: beta_hat length does not match G");
  const auto k = static_cast<Eigen::Index>(support.size());
  Eigen::VectorXd values = Eigen::VectorXd::Zero(M);
  if (k == 0) return CoefficientVector::from_values(std::move(values), Method::DantzigLS, 0.0);

  Eigen::MatrixXd sub(k, k);
  Eigen::VectorXd rhs(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    const auto i = static_cast<Eigen::Index>(support[static_cast<std::size_t>(a)]);
    if (i >= M) throw std::out_of_range("two_step_refit: support index out of range");
    rhs[a] = beta_hat[i];
    for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = gram(i, static_cast<Eigen::Index>(support[static_cast<std::size_t>(b)]));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  const double condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(condition <= max_condition)) {
    std::ostringstream msg;
    msg << "least-squares refit on " << k << " members is ill-conditioned (condition number " << condition << ")";
    throw SolverError(msg.str(), condition);
  }

  const Eigen::VectorXd solution = sub.ldlt().solve(rhs);
  for (Eigen::Index a = 0; a < k; ++a) values[static_cast<Eigen::Index>(support[static_cast<std::size_t>(a)])] = solution[a];
  // Keep the selected support even if a refitted coefficient happens to vanish.
  CoefficientVector out;
  out.method = Method::DantzigLS;
  out.values = std::move(values);
  out.support.assign(support.begin(), support.end());
  out.l1_norm = out.values.cwiseAbs().sum();
  return out;
}

CoefficientVector soft_threshold_estimate(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& eta) {
  if (beta_hat.size() != eta.size()) throw std::invalid_argument("soft_threshold_estimate: length mismatch");
  Eigen::VectorXd values(beta_hat.size());
  for (Eigen::Index m = 0; m < beta_hat.size(); ++m) {
    const double excess = std::abs(beta_hat[m]) - eta[m];
    values[m] = excess > 0.0 ? std::copysign(excess, beta_hat[m]) : 0.0;
  }
  return CoefficientVector::from_values(std::move(values), Method::SoftThreshold, 0.0);
}

}  // namespace sparsedens
