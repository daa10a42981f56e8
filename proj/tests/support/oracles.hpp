#pragma once

// Slow reference implementations used as independent checks by the unit and
// acceptance suites. None of this shares code with the library solvers.

#include "sparsedens/dictionary.hpp"
#include "sparsedens/empirical.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Random unit-diagonal PSD matrix: normalized A^T A with A of shape rows x size.
inline MatrixXd random_gram(std::mt19937_64& rng, int size, int rows) {
  std::normal_distribution<double> normal;
  MatrixXd a(rows, size);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < size; ++j) a(i, j) = normal(rng);
  MatrixXd g = a.transpose() * a;
  const VectorXd d = g.diagonal().cwiseSqrt().cwiseInverse();
  g = d.asDiagonal() * g * d.asDiagonal();
  g = 0.5 * (g + g.transpose());
  g.diagonal().setOnes();
  return g;
}

struct Instance {
  MatrixXd gram;
  VectorXd beta;
};

/// Gram matrix as above with beta = D A^T y, so beta lies in the range of G
/// as empirical coefficients of a redundant dictionary do.
inline Instance random_instance(std::mt19937_64& rng, int size, int rows, double scale) {
  std::normal_distribution<double> normal;
  MatrixXd a(rows, size);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < size; ++j) a(i, j) = normal(rng);
  VectorXd y(rows);
  for (int i = 0; i < rows; ++i) y[i] = normal(rng);
  const VectorXd d = a.colwise().norm().cwiseInverse().transpose();
  MatrixXd g = d.asDiagonal() * (a.transpose() * a) * d.asDiagonal();
  g = 0.5 * (g + g.transpose());
  g.diagonal().setOnes();
  VectorXd beta = d.asDiagonal() * (a.transpose() * y);
  beta *= scale / std::sqrt(static_cast<double>(rows));
  return {g, beta};
}

inline VectorXd random_vector(std::mt19937_64& rng, int size, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  VectorXd v(size);
  for (int i = 0; i < size; ++i) v[i] = normal(rng);
  return v;
}

inline VectorXd random_positive(std::mt19937_64& rng, int size, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  VectorXd v(size);
  for (int i = 0; i < size; ++i) v[i] = u(rng);
  return v;
}

struct LpVertex {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  VectorXd lambda;
};

/// min |lambda|_1 s.t. |G lambda - beta|_inf <= eta, by enumerating every
/// vertex of the feasible polytope intersected with a coordinate orthant.
/// A vertex fixes a zero set Z and |Z^c| active rows T, each at its upper or
/// lower bound; it is kept when G(T, Z^c) is nonsingular and the point is
/// feasible.
inline LpVertex dantzig_by_vertices(const MatrixXd& g, const VectorXd& beta, const VectorXd& eta,
                                    double feas_tol = 1e-9) {
  const int m = static_cast<int>(g.rows());
  LpVertex best;
  auto consider = [&](const VectorXd& lambda) {
    const VectorXd r = g * lambda - beta;
    for (int i = 0; i < m; ++i)
      if (std::abs(r[i]) > eta[i] + feas_tol) return;
    const double obj = lambda.lpNorm<1>();
    if (obj < best.objective) {
      best.feasible = true;
      best.objective = obj;
      best.lambda = lambda;
    }
  };

  for (unsigned free_mask = 0; free_mask < (1u << m); ++free_mask) {
    std::vector<int> free;
    for (int i = 0; i < m; ++i)
      if (free_mask & (1u << i)) free.push_back(i);
    const int k = static_cast<int>(free.size());
    if (k == 0) {
      consider(VectorXd::Zero(m));
      continue;
    }
    for (unsigned row_mask = 0; row_mask < (1u << m); ++row_mask) {
      if (__builtin_popcount(row_mask) != k) continue;
      std::vector<int> rows;
      for (int i = 0; i < m; ++i)
        if (row_mask & (1u << i)) rows.push_back(i);
      MatrixXd sub(k, k);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) sub(a, b) = g(rows[a], free[b]);
      Eigen::FullPivLU<MatrixXd> lu(sub);
      lu.setThreshold(1e-10);
      if (lu.rank() < k) continue;
      for (unsigned signs = 0; signs < (1u << k); ++signs) {
        VectorXd rhs(k);
        for (int a = 0; a < k; ++a) rhs[a] = beta[rows[a]] + ((signs >> a) & 1u ? eta[rows[a]] : -eta[rows[a]]);
        const VectorXd x = lu.solve(rhs);
        VectorXd lambda = VectorXd::Zero(m);
        for (int b = 0; b < k; ++b) lambda[free[b]] = x[b];
        consider(lambda);
      }
    }
  }
  return best;
}

/// Weighted Lasso lambda'G lambda - 2 beta'lambda + 2 sum eta |lambda| by
/// accelerated proximal gradient with adaptive restart.
inline VectorXd lasso_by_fista(const MatrixXd& g, const VectorXd& beta, const VectorXd& eta,
                               int iterations = 200000) {
  const int m = static_cast<int>(g.rows());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(g, Eigen::EigenvaluesOnly);
  const double step = 1.0 / (2.0 * es.eigenvalues().maxCoeff());
  auto prox = [&](const VectorXd& v) {
    VectorXd out(m);
    for (int i = 0; i < m; ++i) {
      const double t = 2.0 * step * eta[i];
      out[i] = v[i] > t ? v[i] - t : (v[i] < -t ? v[i] + t : 0.0);
    }
    return out;
  };
  auto objective = [&](const VectorXd& l) {
    return l.dot(g * l) - 2.0 * beta.dot(l) + 2.0 * eta.cwiseProduct(l.cwiseAbs()).sum();
  };
  VectorXd x = VectorXd::Zero(m);
  VectorXd y = x;
  double t = 1.0;
  double prev = objective(x);
  for (int it = 0; it < iterations; ++it) {
    const VectorXd next = prox(y - step * 2.0 * (g * y - beta));
    const double obj = objective(next);
    if (obj > prev) {
      // restart the momentum
      y = x;
      t = 1.0;
      continue;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / tn) * (next - x);
    if ((next - x).lpNorm<Eigen::Infinity>() < 1e-15) {
      x = next;
      break;
    }
    x = next;
    t = tn;
    prev = obj;
  }
  return x;
}

/// (1 / (n(n-1))) sum_{i<j} (phi(X_i) - phi(X_j))^2, evaluated pair by pair.
inline double pairwise_variance(const std::vector<double>& phi) {
  const std::size_t n = phi.size();
  long double acc = 0.0L;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const long double d = static_cast<long double>(phi[i]) - phi[j];
      acc += d * d;
    }
  return static_cast<double>(acc / (static_cast<long double>(n) * (n - 1)));
}

inline std::vector<double> member_values(const sparsedens::Dictionary& dict, std::size_t m,
                                         const std::vector<double>& xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(dict.evaluate(m, x));
  return out;
}

/// Kolmogorov-Smirnov distance of a sample to the uniform law on [0, 1].
inline double ks_uniform(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - xs[i]);
    d = std::max(d, xs[i] - static_cast<double>(i) / n);
  }
  return d;
}

}  // namespace oracle
