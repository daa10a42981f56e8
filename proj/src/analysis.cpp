#include "sparsedens/analysis.hpp"

#include "sparsedens/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sparsedens {
namespace {

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double out = 1.0;
  for (std::size_t i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(out);
}

// Advances idx (strictly increasing, values < n) to the next combination.
bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& f) {
  if (k == 0 || k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  do f(idx);
  while (next_combination(idx, n));
}

// Splits (a, b) with a <= l, b <= l', a + b <= M that are not contained in a
// larger admissible split. Block norms grow with the blocks, so these suffice.
std::vector<std::pair<std::size_t, std::size_t>> maximal_splits(std::size_t size, std::size_t l,
                                                                std::size_t l_prime) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a = 1; a <= std::min(l, size - 1); ++a) {
    const std::size_t b = std::min(l_prime, size - a);
    if (b == 0) continue;
    if (a == l || a + b == size) out.emplace_back(a, b);
  }
  return out;
}

void check_budget(double count, double budget, const char* what) {
  if (count > budget) {
    std::ostringstream msg;
    msg << what << " needs " << count << " subsets, budget is " << budget;
    throw BudgetError(msg.str());
  }
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& g, const std::vector<std::size_t>& rows,
                          const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b)
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          g(static_cast<Eigen::Index>(rows[a]), static_cast<Eigen::Index>(cols[b]));
  return out;
}

}  // namespace

double eigenvalue_subset_count(std::size_t size, std::size_t l) {
  double total = 0.0;
  for (std::size_t k = 1; k <= std::min(l, size); ++k) total += binomial(size, k);
  return total;
}

double correlation_pair_count(std::size_t size, std::size_t l, std::size_t l_prime) {
  double total = 0.0;
  for (auto [a, b] : maximal_splits(size, l, l_prime)) total += binomial(size, a) * binomial(size - a, b);
  return total;
}

RestrictedEigenvalues restricted_eigenvalues(const GramMatrix& gram, std::size_t l, double budget) {
  const auto size = static_cast<std::size_t>(gram.size());
  if (l == 0 || l > size) throw std::invalid_argument("restricted_eigenvalues: need 1 <= l <= M");
  check_budget(eigenvalue_subset_count(size, l), budget, "restricted eigenvalues");
  const Eigen::MatrixXd& g = gram.matrix();
  RestrictedEigenvalues out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  for (std::size_t k = 1; k <= l; ++k) {
    for_each_subset(size, k, [&](const std::vector<std::size_t>& j) {
      es.compute(submatrix(g, j, j), Eigen::EigenvaluesOnly);
      out.phi_min = std::min(out.phi_min, es.eigenvalues()[0]);
      out.phi_max = std::max(out.phi_max, es.eigenvalues()[static_cast<Eigen::Index>(k) - 1]);
    });
  }
  return out;
}

double restricted_correlation(const GramMatrix& gram, std::size_t l, std::size_t l_prime, double budget) {
  const auto size = static_cast<std::size_t>(gram.size());
  if (l == 0 || l_prime == 0) throw std::invalid_argument("restricted_correlation: sizes must be positive");
  if (size < 2) return 0.0;
  check_budget(correlation_pair_count(size, l, l_prime), budget, "restricted correlation");
  const Eigen::MatrixXd& g = gram.matrix();
  double best = 0.0;
  std::vector<std::size_t> rest;
  std::vector<std::size_t> cols;
  for (auto [a, b] : maximal_splits(size, l, l_prime)) {
    for_each_subset(size, a, [&](const std::vector<std::size_t>& j) {
      rest.clear();
      for (std::size_t i = 0, p = 0; i < size; ++i) {
        if (p < j.size() && j[p] == i) {
          ++p;
          continue;
        }
        rest.push_back(i);
      }
      for_each_subset(rest.size(), b, [&](const std::vector<std::size_t>& pos) {
        cols.resize(pos.size());
        for (std::size_t i = 0; i < pos.size(); ++i) cols[i] = rest[pos[i]];
        const Eigen::MatrixXd block = submatrix(g, j, cols);
        const double norm = (a == 1 || b == 1) ? block.norm() : Eigen::JacobiSVD<Eigen::MatrixXd>(block).singularValues()[0];
        best = std::max(best, norm);
      });
    });
  }
  return best;
}

AssumptionCheck assumption_constants(std::size_t s, std::size_t l, double phi_min_2s, double theta_s_2s,
                                     double phi_min_s_plus_l, double phi_max_l) {
  AssumptionCheck c;
  c.s = s;
  c.l = l;
  c.phi_min_2s = phi_min_2s;
  c.theta_s_2s = theta_s_2s;
  c.phi_min_s_plus_l = phi_min_s_plus_l;
  c.phi_max_l = phi_max_l;
  const double ds = static_cast<double>(s);
  const double dl = static_cast<double>(l);
  c.assumption1 = phi_min_2s > theta_s_2s;
  c.assumption2 = dl * phi_min_s_plus_l > ds * phi_max_l;
  if (phi_min_2s > 0.0) {
    c.kappa1 = std::sqrt(phi_min_2s) * (1.0 - theta_s_2s / phi_min_2s);
    c.mu1 = theta_s_2s / std::sqrt(ds * phi_min_2s);
  } else {
    c.kappa1 = -std::numeric_limits<double>::infinity();
    c.mu1 = std::numeric_limits<double>::infinity();
  }
  if (phi_min_s_plus_l > 0.0)
    c.kappa2 = std::sqrt(phi_min_s_plus_l) * (1.0 - std::sqrt(ds * phi_max_l / (dl * phi_min_s_plus_l)));
  else
    c.kappa2 = -std::numeric_limits<double>::infinity();
  c.mu2 = std::sqrt(phi_max_l / dl);
  return c;
}

AssumptionCheck check_assumptions(const GramMatrix& gram, std::size_t s, std::size_t l, double budget) {
  const auto size = static_cast<std::size_t>(gram.size());
  if (s < 1 || 2 * s > size) throw std::invalid_argument("check_assumptions: need 1 <= s <= M/2");
  if (l < s || s + l > size) throw std::invalid_argument("check_assumptions: need s <= l and s + l <= M");
  const auto r2s = restricted_eigenvalues(gram, 2 * s, budget);
  const auto rsl = restricted_eigenvalues(gram, s + l, budget);
  const auto rl = restricted_eigenvalues(gram, l, budget);
  const double theta = restricted_correlation(gram, s, 2 * s, budget);
  return assumption_constants(s, l, r2s.phi_min, theta, rsl.phi_min, rl.phi_max);
}

StructuralReport structural_report(const GramMatrix& gram, std::size_t l_max, double budget) {
  const auto size = static_cast<std::size_t>(gram.size());
  if (l_max == 0 || l_max > size) throw std::invalid_argument("structural_report: need 1 <= l_max <= M");
  StructuralReport rep;
  rep.size = size;
  rep.l_max = l_max;
  for (std::size_t l = 1; l <= l_max; ++l) {
    const auto r = restricted_eigenvalues(gram, l, budget);
    rep.phi_min[l] = r.phi_min;
    rep.phi_max[l] = r.phi_max;
  }
  for (std::size_t s = 1; 2 * s <= std::min(size, l_max); ++s) {
    const double theta = restricted_correlation(gram, s, 2 * s, budget);
    rep.theta[{s, 2 * s}] = theta;
    for (std::size_t l = s; s + l <= l_max; ++l)
      rep.checks.push_back(assumption_constants(s, l, rep.phi_min[2 * s], theta, rep.phi_min[s + l], rep.phi_max[l]));
  }
  return rep;
}

double local_assumption_margin(const GramMatrix& gram, std::span<const std::size_t> j0,
                               const Eigen::VectorXd& lambda, double kappa, double mu) {
  if (lambda.size() != gram.size()) throw std::invalid_argument("local_assumption_margin: dimension mismatch");
  const double norm_f = std::sqrt(std::max(0.0, lambda.dot(gram.matrix() * lambda)));
  double in_l2 = 0.0;
  double in_l1 = 0.0;
  for (auto m : j0) {
    const double v = lambda[static_cast<Eigen::Index>(m)];
    in_l2 += v * v;
    in_l1 += std::abs(v);
  }
  const double out_l1 = lambda.cwiseAbs().sum() - in_l1;
  return norm_f - kappa * std::sqrt(in_l2) + mu * std::max(0.0, out_l1 - in_l1);
}

double lambda_deviation(const Eigen::VectorXd& lambda, std::span<const std::size_t> j0,
                        const Eigen::VectorXd& lambda_hat) {
  double in_l1 = 0.0;
  for (auto m : j0) in_l1 += std::abs(lambda[static_cast<Eigen::Index>(m)]);
  const double l1 = lambda.cwiseAbs().sum();
  return (l1 - in_l1) + 0.5 * std::max(0.0, lambda_hat.cwiseAbs().sum() - l1);
}

double oracle_bound_rhs(const Eigen::VectorXd& lambda, std::span<const std::size_t> j0,
                        const Eigen::VectorXd& lambda_hat, double eta_inf, double kappa, double mu, double beta,
                        double bias_sq) {
  if (!(beta > 0.0) || !(kappa > 0.0)) throw std::invalid_argument("oracle_bound_rhs: need beta > 0 and kappa > 0");
  if (j0.empty()) throw std::invalid_argument("oracle_bound_rhs: J0 must be nonempty");
  if (lambda.size() != lambda_hat.size()) throw std::invalid_argument("oracle_bound_rhs: dimension mismatch");
  const double s = static_cast<double>(j0.size());
  const double big_lambda = lambda_deviation(lambda, j0, lambda_hat);
  const double factor = 1.0 + 2.0 * mu * std::sqrt(s) / kappa;
  return bias_sq + beta * big_lambda * big_lambda / s * factor * factor +
         16.0 * s * (1.0 / beta + 1.0 / (kappa * kappa)) * eta_inf * eta_inf;
}

}  // namespace sparsedens
