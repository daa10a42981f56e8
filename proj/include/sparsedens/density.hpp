#pragma once

#include "sparsedens/empirical.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace sparsedens {

enum class DensityId { Uniform, F1, F2, F3, F4 };

std::string_view to_string(DensityId id);
/// Accepts uniform, f1, f2, f3, f4.
DensityId parse_density(std::string_view name);

/// Seed for replication `index` of a run with base seed `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// mt19937_64 seeded through SplitMix64, with uniforms built from the top 53 bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  /// Uniform on [0, 1).
  double uniform();
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// One mixture component on [0, 1].
struct Component {
  enum class Kind { Interval, Triangle, TruncatedGaussian, TruncatedLaplace, RaisedCosine };
  Kind kind;
  double weight;
  double a = 0.0;  // Interval: left end; Gaussian/Laplace: location; RaisedCosine: amplitude
  double b = 0.0;  // Interval: right end; Gaussian: scale; Laplace: rate
  double mass_lo = 0.0;  // Gaussian: Phi(-a/b); Laplace: rate times the normalizing integral
  double mass_hi = 1.0;  // Gaussian: Phi((1-a)/b)

  /// Fills the normalizing constants; called once at construction.
  void prepare();

  double pdf(double x) const;
  double cdf(double x) const;
  double quantile(double u) const;
};

/// A mixture density on [0, 1] with exact evaluation, distribution function
/// and inverse-CDF sampling.
///
///  - uniform: 1 on [0, 1]
///  - f1: .47 triangle peaked at 1/2 + .53 uniform on [.5, .5 + 1/75]
///  - f2: .45 Gaussian(.45, .125) + .55 Laplace-type e^{-20|t-.67|}, both truncated to [0, 1]
///  - f3: .25 uniform on [.33, .47] + .75 uniform on [.64, .80]
///  - f4: .45 (1 + .9 cos 2 pi t) + .55 uniform on [.64, .80]
class TrueDensity {
 public:
  static TrueDensity make(DensityId id);

  DensityId id() const noexcept { return id_; }
  std::string_view name() const noexcept { return to_string(id_); }
  const std::vector<Component>& components() const noexcept { return components_; }

  double pdf(double x) const;
  double cdf(double x) const;
  /// P(a <= X <= b), computed from the distribution function.
  double mass(double a, double b) const;
  double sup_norm() const noexcept { return sup_norm_; }
  double l2_norm_sq() const noexcept { return l2_norm_sq_; }
  /// Points where the density or one of its derivatives jumps, with 0 and 1.
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }

  /// Component index drawn with the mixture weights, then an exact quantile.
  double draw(Rng& rng) const;
  std::vector<double> draw(std::size_t n, Rng& rng) const;
  /// n draws from a generator seeded with `seed`.
  Sample sample(std::size_t n, std::uint64_t seed) const;

 private:
  TrueDensity() = default;
  void finalize();

  DensityId id_ = DensityId::Uniform;
  std::vector<Component> components_;
  std::vector<double> cumulative_;
  std::vector<double> breakpoints_;
  double sup_norm_ = 0.0;
  double l2_norm_sq_ = 0.0;
};

}  // namespace sparsedens
