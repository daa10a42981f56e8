#pragma once

#include "sparsedens/dictionary.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace sparsedens {

/// Observations X_1..X_n in [0, 1].
struct Sample {
  std::vector<double> values;
  std::optional<std::uint64_t> seed;  // set when the sample is synthetic

  std::size_t size() const noexcept { return values.size(); }
};

/// Validates that every value lies in [0, 1] and that n >= 2.
Sample make_sample(std::vector<double> values, std::optional<std::uint64_t> seed = std::nullopt);

/// Per-member empirical mean and unbiased variance of phi_m(X).
struct SampleMoments {
  Eigen::VectorXd beta_hat;
  Eigen::VectorXd sigma_hat_sq;
  std::size_t n = 0;
};

/// One pass over the sample with compensated summation. sigma_hat_sq uses
/// the identity n/(n-1) * (mean(phi^2) - mean(phi)^2), clamped at zero.
SampleMoments sample_moments(const Sample& sample, const Dictionary& dict);

Eigen::VectorXd beta_hat(const Sample& sample, const Dictionary& dict);
double sigma_hat_sq(const Sample& sample, const Dictionary& dict, std::size_t m);

/// sigma_hat^2 + 2|phi|_inf sqrt(2 sigma_hat^2 gamma log M / n) + 8 |phi|_inf^2 gamma log M / n
double sigma_tilde_sq(double sigma_hat_sq, double sup_norm, double gamma, std::size_t dictionary_size,
                      std::size_t n);

/// sqrt(2 sigma_tilde^2 gamma log M / n) + 2 |phi|_inf gamma log M / (3n)
double eta(double sigma_tilde_sq, double sup_norm, double gamma, std::size_t dictionary_size, std::size_t n);

struct EtaEnvelope {
  double lower;
  double upper;
};

/// Deterministic bounds that bracket eta with high probability when the
/// true variance sigma0^2 of phi_m(X) is known.
EtaEnvelope eta_envelopes(double sigma0_sq, double sup_norm, double gamma, std::size_t dictionary_size,
                          std::size_t n);

/// Threshold with sigma_tilde^2 replaced by the known sup-norm of the density.
double non_adaptive_eta(double density_sup, double sup_norm, double gamma, std::size_t dictionary_size,
                        std::size_t n);

struct EmpiricalStats {
  Eigen::VectorXd beta_hat;
  Eigen::VectorXd sigma_hat_sq;
  Eigen::VectorXd sigma_tilde_sq;
  Eigen::VectorXd eta;
  double gamma = 0.0;
  double log_M = 0.0;
  std::size_t n = 0;
};

/// Adaptive thresholds for every member. log M uses the natural logarithm.
EmpiricalStats empirical_stats(const SampleMoments& moments, const Eigen::VectorXd& sup_norms, double gamma);
EmpiricalStats empirical_stats(const Sample& sample, const Dictionary& dict, double gamma);

/// Non-adaptive thresholds; sigma_tilde_sq holds the substituted sup-norm.
EmpiricalStats non_adaptive_stats(const SampleMoments& moments, const Eigen::VectorXd& sup_norms, double gamma,
                                  double density_sup);

}  // namespace sparsedens
