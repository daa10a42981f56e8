#include "sparsedens/dictionary.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace sparsedens::detail {
namespace {

// Daubechies filter with six taps (three vanishing moments), sum = sqrt(2).
std::array<double, 6> filter() {
  const double r10 = std::sqrt(10.0);
  const double r = std::sqrt(5.0 + 2.0 * r10);
  std::array<double, 6> h = {1.0 + r10 + r,       5.0 + r10 + 3.0 * r, 10.0 - 2.0 * r10 + 2.0 * r,
                             10.0 - 2.0 * r10 - 2.0 * r, 5.0 + r10 - 3.0 * r, 1.0 + r10 - r};
  const double scale = std::sqrt(2.0) / 32.0;
  for (auto& v : h) v *= scale;
  return h;
}

constexpr int kSupport = 5;        // psi and phi live on [0, 5]
constexpr int kResolution = 16;    // psi tabulated at spacing 2^-16

/// Exact values at dyadic points of the wavelet, computed by the two-scale
/// recursion started from the integer values of the scaling function.
class Table {
 public:
  Table() {
    const auto h = filter();
    const int fine = kResolution + 1;
    const std::size_t phi_points = (std::size_t{kSupport} << fine) + 1;
    std::vector<double> phi(phi_points, 0.0);

    // phi at integers 1..4: eigenvector of A_{ij} = sqrt2 h_{2i-j} for eigenvalue 1.
    Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
    for (int i = 1; i <= 4; ++i)
      for (int j = 1; j <= 4; ++j) {
        const int idx = 2 * i - j;
        if (idx >= 0 && idx < 6) a(i - 1, j - 1) = std::sqrt(2.0) * h[static_cast<std::size_t>(idx)];
      }
    Eigen::EigenSolver<Eigen::Matrix4d> es(a);
    int best = 0;
    for (int i = 1; i < 4; ++i)
      if (std::abs(es.eigenvalues()[i] - 1.0) < std::abs(es.eigenvalues()[best] - 1.0)) best = i;
    Eigen::Vector4d v = es.eigenvectors().col(best).real();
    v /= v.sum();
    for (int i = 1; i <= 4; ++i) phi[static_cast<std::size_t>(i) << fine] = v[i - 1];

    // Refine: values at odd multiples of 2^-r from values at level r-1.
    auto phi_at = [&](long numerator, int level) -> double {
      // value of phi at numerator / 2^level, level <= fine
      if (numerator <= 0 || numerator >= (long{kSupport} << level)) return 0.0;
      return phi[static_cast<std::size_t>(numerator) << (fine - level)];
    };
    for (int r = 1; r <= fine; ++r) {
      const long count = long{kSupport} << r;
      for (long p = 1; p < count; p += 2) {
        double acc = 0.0;
        // phi(p / 2^r) = sqrt2 sum_k h_k phi(p / 2^(r-1) - k)
        for (int k = 0; k < 6; ++k) acc += h[static_cast<std::size_t>(k)] * phi_at(p - (long{k} << (r - 1)), r - 1);
        phi[static_cast<std::size_t>(p) << (fine - r)] = std::sqrt(2.0) * acc;
      }
    }

    // psi(x) = sqrt2 sum_k g_k phi(2x - k), g_k = (-1)^k h_{5-k}.
    const std::size_t psi_points = (std::size_t{kSupport} << kResolution) + 1;
    psi_.assign(psi_points, 0.0);
    for (std::size_t p = 0; p < psi_points; ++p) {
      double acc = 0.0;
      for (int k = 0; k < 6; ++k) {
        const double g = (k % 2 == 0 ? 1.0 : -1.0) * h[static_cast<std::size_t>(5 - k)];
        // 2 p / 2^16 - k on the grid of spacing 2^-17
        acc += g * phi_at(static_cast<long>(p) * 4 - (long{k} << fine), fine);
      }
      psi_[p] = std::sqrt(2.0) * acc;
    }
  }

  /// Linear interpolation of psi at u; zero outside [0, 5].
  double psi(double u) const {
    if (u <= 0.0 || u >= kSupport) return 0.0;
    const double t = std::ldexp(u, kResolution);
    const auto i = static_cast<std::size_t>(t);
    const double w = t - static_cast<double>(i);
    if (i + 1 >= psi_.size()) return psi_.back();
    return (1.0 - w) * psi_[i] + w * psi_[i + 1];
  }

  const std::vector<double>& samples() const { return psi_; }

 private:
  std::vector<double> psi_;
};

const Table& table() {
  static const Table t;
  return t;
}

}  // namespace

double daubechies_periodized(int level, int shift, double x) {
  const double width = std::ldexp(1.0, level);
  // u = 2^j x - k, shifted by multiples of 2^j into [0, 5).
  double u = width * x - shift;
  u -= width * std::floor(u / width);  // u in [0, width)
  double acc = 0.0;
  for (; u < kSupport; u += width) acc += table().psi(u);
  return std::sqrt(width) * acc;
}

double daubechies_sup_norm(int level) {
  // psi vanishes at both ends of its support, so summing table entries that
  // are one period apart gives the periodized function exactly.
  const auto& psi = table().samples();
  const std::size_t period = std::size_t{1} << (kResolution + level);
  double best = 0.0;
  for (std::size_t i = 0; i < std::min(period, psi.size()); ++i) {
    double acc = 0.0;
    for (std::size_t p = i; p < psi.size(); p += period) acc += psi[p];
    best = std::max(best, std::abs(acc));
  }
  return best * std::sqrt(std::ldexp(1.0, level));
}

double daubechies_integrate(int level, int shift, const std::function<double(double)>& g,
                            std::span<const double> breakpoints) {
  // int_0^1 psi_jk g = 2^{j/2} int psi(2^j y - k) g(frac(y)) dy, taken cell
  // by cell on the table grid where psi is linear, with a two-point Gauss
  // rule on every piece between breakpoints of g.
  const auto& psi = table().samples();
  const double cell_u = std::ldexp(1.0, -kResolution);
  const double inv_width = std::ldexp(1.0, -level);
  const double cell_y = cell_u * inv_width;
  const double node = 0.5 / std::sqrt(3.0);
  std::vector<double> cuts;
  cuts.reserve(8);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < psi.size(); ++i) {
    const double p0 = psi[i];
    const double p1 = psi[i + 1];
    if (p0 == 0.0 && p1 == 0.0) continue;
    const double y0 = (static_cast<double>(i) * cell_u + shift) * inv_width;
    const double y1 = y0 + cell_y;
    const double whole = std::floor(y0);
    cuts.assign({y0, y1});
    for (double b : breakpoints)
      for (double y : {whole + b, whole + 1.0 + b})
        if (y > y0 && y < y1) cuts.push_back(y);
    if (cuts.size() > 2) std::sort(cuts.begin(), cuts.end());
    double cell = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double mid = 0.5 * (cuts[c] + cuts[c + 1]);
      const double len = cuts[c + 1] - cuts[c];
      for (double y : {mid - node * len, mid + node * len}) {
        const double w = (y - y0) / cell_y;
        cell += 0.5 * len * ((1.0 - w) * p0 + w * p1) * g(y - std::floor(y));
      }
    }
    total += cell;
  }
  return std::sqrt(std::ldexp(1.0, level)) * total;
}

}  // namespace sparsedens::detail
