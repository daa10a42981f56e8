#pragma once

#include "sparsedens/gram.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace sparsedens {

inline constexpr double kDefaultSubsetBudget = 1e6;

struct RestrictedEigenvalues {
  double phi_min;
  double phi_max;
};

/// Extreme eigenvalues over all principal submatrices G_J with 1 <= |J| <= l,
/// by exhaustive enumeration. Throws BudgetError when more than `budget`
/// subsets would be visited.
RestrictedEigenvalues restricted_eigenvalues(const GramMatrix& gram, std::size_t l,
                                             double budget = kDefaultSubsetBudget);

/// Largest spectral norm of G_{J,J'} over disjoint J, J' with |J| <= l and
/// |J'| <= l'. When l + l' > M the sizes are split so that |J| + |J'| <= M.
double restricted_correlation(const GramMatrix& gram, std::size_t l, std::size_t l_prime,
                              double budget = kDefaultSubsetBudget);

/// Number of subsets restricted_eigenvalues(l) visits.
double eigenvalue_subset_count(std::size_t size, std::size_t l);
/// Number of (J, J') pairs restricted_correlation(l, l') visits.
double correlation_pair_count(std::size_t size, std::size_t l, std::size_t l_prime);

struct AssumptionCheck {
  std::size_t s = 0;
  std::size_t l = 0;
  double phi_min_2s = 0.0;
  double theta_s_2s = 0.0;
  double phi_min_s_plus_l = 0.0;
  double phi_max_l = 0.0;
  bool assumption1 = false;  // phi_min(2s) > theta_{s,2s}
  bool assumption2 = false;  // l phi_min(s+l) > s phi_max(l)
  double kappa1 = 0.0;
  double mu1 = 0.0;
  double kappa2 = 0.0;
  double mu2 = 0.0;
};

/// Evaluates both structural assumptions and the constants of the local
/// assumption they imply. Requires 1 <= s <= M/2, l >= s and s + l <= M.
AssumptionCheck check_assumptions(const GramMatrix& gram, std::size_t s, std::size_t l,
                                  double budget = kDefaultSubsetBudget);

/// The same from precomputed restricted quantities.
AssumptionCheck assumption_constants(std::size_t s, std::size_t l, double phi_min_2s, double theta_s_2s,
                                     double phi_min_s_plus_l, double phi_max_l);

struct StructuralReport {
  std::size_t size = 0;
  std::size_t l_max = 0;
  std::map<std::size_t, double> phi_min;
  std::map<std::size_t, double> phi_max;
  std::map<std::pair<std::size_t, std::size_t>, double> theta;
  std::vector<AssumptionCheck> checks;  // one per (s, l) with s <= l, 2s <= M, s + l <= l_max
};

/// Restricted eigenvalues for l = 1..l_max, the correlations needed by the
/// assumption checks, and every admissible (s, l) check.
StructuralReport structural_report(const GramMatrix& gram, std::size_t l_max,
                                   double budget = kDefaultSubsetBudget);

/// ||f_lambda|| - kappa ||lambda_J0||_2 + mu (||lambda_J0^c||_1 - ||lambda_J0||_1)_+,
/// nonnegative exactly when the local assumption holds at lambda.
double local_assumption_margin(const GramMatrix& gram, std::span<const std::size_t> j0,
                               const Eigen::VectorXd& lambda, double kappa, double mu);

/// ||lambda_J0^c||_1 + (||lambda_hat||_1 - ||lambda||_1)_+ / 2
double lambda_deviation(const Eigen::VectorXd& lambda, std::span<const std::size_t> j0,
                        const Eigen::VectorXd& lambda_hat);

/// bias_sq + beta Lambda^2/|J0| (1 + 2 mu sqrt|J0| / kappa)^2 + 16 |J0| (1/beta + 1/kappa^2) eta_inf^2
double oracle_bound_rhs(const Eigen::VectorXd& lambda, std::span<const std::size_t> j0,
                        const Eigen::VectorXd& lambda_hat, double eta_inf, double kappa, double mu, double beta,
                        double bias_sq);

}  // namespace sparsedens
