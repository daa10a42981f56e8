#include "sparsedens/empirical.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sparsedens {

Sample make_sample(std::vector<double> values, std::optional<std::uint64_t> seed) {
  if (values.size() < 2) throw std::invalid_argument("a sample needs at least two observations");
  for (double v : values)
    if (!(v >= 0.0 && v <= 1.0)) throw std::out_of_range("sample value " + std::to_string(v) + " outside [0, 1]");
  return Sample{std::move(values), seed};
}

namespace {

/// Neumaier compensated accumulator.
struct Compensated {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) noexcept {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      carry += (sum - t) + v;
    else
      carry += (v - t) + sum;
    sum = t;
  }
  double value() const noexcept { return sum + carry; }
};

void check_gamma(double gamma, std::size_t dictionary_size, std::size_t n) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (dictionary_size < 2) throw std::invalid_argument("thresholds need M >= 2");
  if (n < 1) throw std::invalid_argument("thresholds need n >= 1");
}

}  // namespace

SampleMoments sample_moments(const Sample& sample, const Dictionary& dict) {
  const std::size_t n = sample.size();
  if (n < 2) throw std::invalid_argument("sample moments need n >= 2");
  std::vector<Compensated> first(dict.size());
  std::vector<Compensated> second(dict.size());
  for (double x : sample.values) {
    dict.for_each_nonzero(x, [&](std::size_t m, double v) {
      first[m].add(v);
      second[m].add(v * v);
    });
  }
  SampleMoments out;
  out.n = n;
  const auto size = static_cast<Eigen::Index>(dict.size());
  out.beta_hat.resize(size);
  out.sigma_hat_sq.resize(size);
  const double nn = static_cast<double>(n);
  for (Eigen::Index m = 0; m < size; ++m) {
    const double mean = first[static_cast<std::size_t>(m)].value() / nn;
    const double mean_sq = second[static_cast<std::size_t>(m)].value() / nn;
    out.beta_hat[m] = mean;
    out.sigma_hat_sq[m] = std::max(0.0, nn / (nn - 1.0) * (mean_sq - mean * mean));
  }
  return out;
}

Eigen::VectorXd beta_hat(const Sample& sample, const Dictionary& dict) { return sample_moments(sample, dict).beta_hat; }

double sigma_hat_sq(const Sample& sample, const Dictionary& dict, std::size_t m) {
  const std::size_t n = sample.size();
  if (n < 2) throw std::invalid_argument("sigma_hat_sq needs n >= 2");
  Compensated first;
  Compensated second;
  for (double x : sample.values) {
    const double v = dict.evaluate(m, x);
    first.add(v);
    second.add(v * v);
  }
  const double nn = static_cast<double>(n);
  const double mean = first.value() / nn;
  return std::max(0.0, nn / (nn - 1.0) * (second.value() / nn - mean * mean));
}

double sigma_tilde_sq(double sigma_hat_sq, double sup_norm, double gamma, std::size_t dictionary_size,
                      std::size_t n) {
  check_gamma(gamma, dictionary_size, n);
  const double r = gamma * std::log(static_cast<double>(dictionary_size)) / static_cast<double>(n);
  return sigma_hat_sq + 2.0 * sup_norm * std::sqrt(2.0 * sigma_hat_sq * r) + 8.0 * sup_norm * sup_norm * r;
}

double eta(double sigma_tilde_sq, double sup_norm, double gamma, std::size_t dictionary_size, std::size_t n) {
  check_gamma(gamma, dictionary_size, n);
  const double r = gamma * std::log(static_cast<double>(dictionary_size)) / static_cast<double>(n);
  return std::sqrt(2.0 * sigma_tilde_sq * r) + 2.0 * sup_norm * r / 3.0;
}

EtaEnvelope eta_envelopes(double sigma0_sq, double sup_norm, double gamma, std::size_t dictionary_size,
                          std::size_t n) {
  check_gamma(gamma, dictionary_size, n);
  const double r = gamma * std::log(static_cast<double>(dictionary_size)) / static_cast<double>(n);
  const double sigma0 = std::sqrt(std::max(0.0, sigma0_sq));
  return {sigma0 * std::sqrt(8.0 * r / 7.0) + 2.0 * sup_norm * r / 3.0,
          sigma0 * std::sqrt(16.0 * r) + 10.0 * sup_norm * r};
}

double non_adaptive_eta(double density_sup, double sup_norm, double gamma, std::size_t dictionary_size,
                        std::size_t n) {
  return eta(density_sup, sup_norm, gamma, dictionary_size, n);
}

EmpiricalStats empirical_stats(const SampleMoments& moments, const Eigen::VectorXd& sup_norms, double gamma) {
  const auto size = moments.beta_hat.size();
  if (sup_norms.size() != size) throw std::invalid_argument("sup-norm vector does not match the moments");
  const auto M = static_cast<std::size_t>(size);
  check_gamma(gamma, M, moments.n);
  EmpiricalStats s;
  s.beta_hat = moments.beta_hat;
  s.sigma_hat_sq = moments.sigma_hat_sq;
  s.sigma_tilde_sq.resize(size);
  s.eta.resize(size);
  s.gamma = gamma;
  s.log_M = std::log(static_cast<double>(M));
  s.n = moments.n;
  for (Eigen::Index m = 0; m < size; ++m) {
    s.sigma_tilde_sq[m] = sigma_tilde_sq(moments.sigma_hat_sq[m], sup_norms[m], gamma, M, moments.n);
    s.eta[m] = eta(s.sigma_tilde_sq[m], sup_norms[m], gamma, M, moments.n);
  }
  return s;
}

EmpiricalStats empirical_stats(const Sample& sample, const Dictionary& dict, double gamma) {
  return empirical_stats(sample_moments(sample, dict), dict.sup_norms(), gamma);
}

EmpiricalStats non_adaptive_stats(const SampleMoments& moments, const Eigen::VectorXd& sup_norms, double gamma,
                                  double density_sup) {
  const auto size = moments.beta_hat.size();
  if (sup_norms.size() != size) throw std::invalid_argument("sup-norm vector does not match the moments");
  const auto M = static_cast<std::size_t>(size);
  EmpiricalStats s;
  s.beta_hat = moments.beta_hat;
  s.sigma_hat_sq = moments.sigma_hat_sq;
  s.sigma_tilde_sq = Eigen::VectorXd::Constant(size, density_sup);
  s.eta.resize(size);
  s.gamma = gamma;
  s.log_M = std::log(static_cast<double>(M));
  s.n = moments.n;
  for (Eigen::Index m = 0; m < size; ++m) s.eta[m] = non_adaptive_eta(density_sup, sup_norms[m], gamma, M, moments.n);
  return s;
}

}  // namespace sparsedens
