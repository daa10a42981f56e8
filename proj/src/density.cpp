#include "sparsedens/density.hpp"

#include "sparsedens/quadrature.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sparsedens {
namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::string_view to_string(DensityId id) {
  switch (id) {
    case DensityId::Uniform: return "uniform";
    case DensityId::F1: return "f1";
    case DensityId::F2: return "f2";
    case DensityId::F3: return "f3";
    case DensityId::F4: return "f4";
  }
  return "?";
}

DensityId parse_density(std::string_view name) {
  if (name == "uniform" || name == "f0") return DensityId::Uniform;
  if (name == "f1") return DensityId::F1;
  if (name == "f2") return DensityId::F2;
  if (name == "f3") return DensityId::F3;
  if (name == "f4") return DensityId::F4;
  throw std::invalid_argument("unknown density '" + std::string(name) + "'");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t state = base + index;
  return splitmix64(state);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t state = seed;
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state))};
  engine_.seed(seq);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

void Component::prepare() {
  if (kind == Kind::TruncatedGaussian) {
    mass_lo = normal_cdf(-a / b);
    mass_hi = normal_cdf((1.0 - a) / b);
  } else if (kind == Kind::TruncatedLaplace) {
    mass_lo = 2.0 - std::exp(-b * a) - std::exp(-b * (1.0 - a));
  }
}

double Component::pdf(double x) const {
  if (x < 0.0 || x > 1.0) return 0.0;
  switch (kind) {
    case Kind::Interval: return (x >= a && x <= b) ? 1.0 / (b - a) : 0.0;
    case Kind::Triangle: return x <= 0.5 ? 4.0 * x : 4.0 * (1.0 - x);
    case Kind::TruncatedGaussian: {
      const double t = (x - a) / b;
      return std::exp(-0.5 * t * t) / (b * std::sqrt(2.0 * std::numbers::pi) * (mass_hi - mass_lo));
    }
    case Kind::TruncatedLaplace: {
      return b * std::exp(-b * std::abs(x - a)) / mass_lo;
    }
    case Kind::RaisedCosine: return 1.0 + a * std::cos(2.0 * std::numbers::pi * x);
  }
  return 0.0;
}

double Component::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  switch (kind) {
    case Kind::Interval: return std::clamp((x - a) / (b - a), 0.0, 1.0);
    case Kind::Triangle: return x <= 0.5 ? 2.0 * x * x : 1.0 - 2.0 * (1.0 - x) * (1.0 - x);
    case Kind::TruncatedGaussian: {
      return (normal_cdf((x - a) / b) - mass_lo) / (mass_hi - mass_lo);
    }
    case Kind::TruncatedLaplace: {
      const double rz = mass_lo;
      if (x < a) return (std::exp(-b * (a - x)) - std::exp(-b * a)) / rz;
      return (1.0 - std::exp(-b * a) + 1.0 - std::exp(-b * (x - a))) / rz;
    }
    case Kind::RaisedCosine: return x + a * std::sin(2.0 * std::numbers::pi * x) / (2.0 * std::numbers::pi);
  }
  return 0.0;
}

double Component::quantile(double u) const {
  u = clamp01(u);
  switch (kind) {
    case Kind::Interval: return a + u * (b - a);
    case Kind::Triangle: return u <= 0.5 ? std::sqrt(0.5 * u) : 1.0 - std::sqrt(0.5 * (1.0 - u));
    case Kind::TruncatedGaussian: {
      const boost::math::normal_distribution<double> n01;
      const double p = std::clamp(mass_lo + u * (mass_hi - mass_lo), mass_lo, mass_hi);
      if (p <= 0.0 || p >= 1.0) return p <= 0.0 ? 0.0 : 1.0;
      return clamp01(a + b * boost::math::quantile(n01, p));
    }
    case Kind::TruncatedLaplace: {
      const double rz = mass_lo;
      const double left = (1.0 - std::exp(-b * a)) / rz;
      if (u < left) return clamp01(a + std::log(u * rz + std::exp(-b * a)) / b);
      return clamp01(a - std::log(1.0 - (u - left) * rz) / b);
    }
    case Kind::RaisedCosine: {
      double lo = 0.0;
      double hi = 1.0;
      double x = u;
      for (int it = 0; it < 64; ++it) {
        const double f = cdf(x) - u;
        if (std::abs(f) <= 1e-12) return x;
        if (f < 0.0) lo = x;
        else hi = x;
        const double d = pdf(x);
        double next = d > 1e-12 ? x - f / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
      }
      // Newton did not settle; finish by bisection on the bracket.
      while (hi - lo > 1e-15) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < u) lo = mid;
        else hi = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return u;
}

TrueDensity TrueDensity::make(DensityId id) {
  using K = Component::Kind;
  TrueDensity d;
  d.id_ = id;
  switch (id) {
    case DensityId::Uniform: d.components_ = {{K::Interval, 1.0, 0.0, 1.0}}; break;
    case DensityId::F1:
      d.components_ = {{K::Triangle, 0.47, 0.0, 0.0}, {K::Interval, 0.53, 0.5, 0.5 + 1.0 / 75.0}};
      break;
    case DensityId::F2:
      d.components_ = {{K::TruncatedGaussian, 0.45, 0.45, 0.125}, {K::TruncatedLaplace, 0.55, 0.67, 20.0}};
      break;
    case DensityId::F3:
      d.components_ = {{K::Interval, 0.25, 0.33, 0.47}, {K::Interval, 0.75, 0.64, 0.80}};
      break;
    case DensityId::F4:
      d.components_ = {{K::RaisedCosine, 0.45, 0.9, 0.0}, {K::Interval, 0.55, 0.64, 0.80}};
      break;
  }
  d.finalize();
  return d;
}

void TrueDensity::finalize() {
  double acc = 0.0;
  breakpoints_ = {0.0, 1.0};
  for (auto& c : components_) {
    c.prepare();
    acc += c.weight;
    cumulative_.push_back(acc);
    switch (c.kind) {
      case Component::Kind::Interval:
        breakpoints_.push_back(c.a);
        breakpoints_.push_back(c.b);
        break;
      case Component::Kind::Triangle: breakpoints_.push_back(0.5); break;
      case Component::Kind::TruncatedLaplace: breakpoints_.push_back(c.a); break;
      default: break;
    }
  }
  cumulative_.back() = 1.0;
  std::sort(breakpoints_.begin(), breakpoints_.end());
  breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());

  // Sup norm: breakpoints and a grid, then golden-section refinement around
  // the best grid point for smooth interior maxima.
  constexpr int kGrid = 1 << 14;
  double best = 0.0;
  double best_x = 0.0;
  for (int i = 0; i <= kGrid; ++i) {
    const double x = static_cast<double>(i) / kGrid;
    if (const double v = pdf(x); v > best) best = v, best_x = x;
  }
  for (double x : breakpoints_) best = std::max(best, pdf(x));
  double lo = std::max(0.0, best_x - 1.0 / kGrid);
  double hi = std::min(1.0, best_x + 1.0 / kGrid);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 80; ++it) {
    const double x1 = hi - g * (hi - lo);
    const double x2 = lo + g * (hi - lo);
    if (pdf(x1) > pdf(x2)) hi = x2;
    else lo = x1;
  }
  sup_norm_ = std::max(best, pdf(0.5 * (lo + hi)));

  l2_norm_sq_ = integrate_piecewise([this](double x) { return pdf(x) * pdf(x); }, 0.0, 1.0, breakpoints_, 1e-12,
                                    1.0 / 16.0);
}

double TrueDensity::pdf(double x) const {
  double v = 0.0;
  for (const auto& c : components_) v += c.weight * c.pdf(x);
  return v;
}

double TrueDensity::cdf(double x) const {
  double v = 0.0;
  for (const auto& c : components_) v += c.weight * c.cdf(x);
  return v;
}

double TrueDensity::mass(double a, double b) const { return b > a ? cdf(b) - cdf(a) : 0.0; }

double TrueDensity::draw(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), components_.size() - 1);
  return components_[k].quantile(rng.uniform());
}

std::vector<double> TrueDensity::draw(std::size_t n, Rng& rng) const {
  std::vector<double> out(n);
  for (auto& x : out) x = draw(rng);
  return out;
}

Sample TrueDensity::sample(std::size_t n, std::uint64_t seed) const {
  Rng rng(seed);
  return make_sample(draw(n, rng), seed);
}

}  // namespace sparsedens
