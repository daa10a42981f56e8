#include "sparsedens/dictionary.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sparsedens {

std::string_view to_string(DictionaryKind kind) {
  switch (kind) {
    case DictionaryKind::Fourier: return "fou";
    case DictionaryKind::Histogram: return "hist";
    case DictionaryKind::Haar: return "haar";
    case DictionaryKind::Daubechies: return "wav";
    case DictionaryKind::Mix: return "mix";
    case DictionaryKind::Mix2: return "mix2";
  }
  return "?";
}

DictionaryKind parse_dictionary_kind(std::string_view name) {
  if (name == "fou" || name == "fourier") return DictionaryKind::Fourier;
  if (name == "hist" || name == "histogram") return DictionaryKind::Histogram;
  if (name == "haar") return DictionaryKind::Haar;
  if (name == "wav" || name == "daubechies") return DictionaryKind::Daubechies;
  if (name == "mix") return DictionaryKind::Mix;
  if (name == "mix2") return DictionaryKind::Mix2;
  throw std::invalid_argument("unknown dictionary kind '" + std::string(name) + "'");
}

int histogram_resolution(std::size_t n) {
  // unique power of two in [sqrt(n)/2, sqrt(n)); compare squares to stay exact
  int j = 0;
  while ((std::size_t{1} << (2 * (j + 1))) < n) ++j;
  return j;
}

int wavelet_resolution(std::size_t n) {
  int j = 0;
  while ((std::size_t{1} << (j + 1)) < n) ++j;
  return j;
}

Dictionary Dictionary::build(DictionaryKind kind, std::size_t n) {
  if (n < 16) throw std::invalid_argument("dictionary sizing requires n >= 16, got " + std::to_string(n));
  Dictionary d;
  d.kind_ = kind;
  d.n_ = n;
  d.j0_ = histogram_resolution(n);
  d.j1_ = wavelet_resolution(n);
  const int frequencies = static_cast<int>(n / 2);
  switch (kind) {
    case DictionaryKind::Fourier:
      d.add_fourier(frequencies);
      break;
    case DictionaryKind::Histogram:
      d.add_histogram(d.j0_);
      break;
    case DictionaryKind::Haar:
      d.add_haar(0, d.j1_ - 1, true);
      break;
    case DictionaryKind::Daubechies:
      d.add_daubechies(d.j1_);
      break;
    case DictionaryKind::Mix:
      d.add_fourier(frequencies);
      d.add_histogram(d.j0_);
      break;
    case DictionaryKind::Mix2:
      d.add_fourier(frequencies);
      d.add_histogram(d.j0_);
      // Coarser Haar levels lie in the span of the histogram bins.
      d.add_haar(d.j0_, d.j1_ - 1, false);
      break;
  }
  d.finalize();
  return d;
}

Dictionary Dictionary::haar(int resolution, std::size_t n) {
  if (resolution < 1 || resolution > 24) throw std::invalid_argument("Haar resolution out of range");
  Dictionary d;
  d.kind_ = DictionaryKind::Haar;
  d.n_ = n;
  d.j0_ = 0;
  d.j1_ = resolution;
  d.add_haar(0, resolution - 1, true);
  d.finalize();
  return d;
}

void Dictionary::add_fourier(int max_frequency) {
  Block b{Basis::Fourier, members_.size(), static_cast<std::size_t>(2 * max_frequency + 1), 1, max_frequency, true};
  members_.push_back({Basis::Fourier, Family::Constant, 0, 0});
  for (int k = 1; k <= max_frequency; ++k) {
    members_.push_back({Basis::Fourier, Family::Cosine, k, 0});
    members_.push_back({Basis::Fourier, Family::Sine, k, 0});
  }
  blocks_.push_back(b);
}

void Dictionary::add_histogram(int level) {
  const int bins = 1 << level;
  blocks_.push_back({Basis::Histogram, members_.size(), static_cast<std::size_t>(bins), level, level, false});
  for (int k = 0; k < bins; ++k) members_.push_back({Basis::Histogram, Family::HistogramBin, level, k});
}

void Dictionary::add_haar(int first_level, int last_level, bool with_constant) {
  const std::size_t offset = members_.size();
  if (with_constant) members_.push_back({Basis::Haar, Family::Constant, -1, 0});
  for (int j = first_level; j <= last_level; ++j)
    for (int k = 0; k < (1 << j); ++k) members_.push_back({Basis::Haar, Family::HaarWavelet, j, k});
  blocks_.push_back({Basis::Haar, offset, members_.size() - offset, first_level, last_level, with_constant});
}

void Dictionary::add_daubechies(int levels) {
  const std::size_t offset = members_.size();
  members_.push_back({Basis::Daubechies, Family::Constant, -1, 0});
  for (int j = 0; j < levels; ++j)
    for (int k = 0; k < (1 << j); ++k) members_.push_back({Basis::Daubechies, Family::DaubechiesWavelet, j, k});
  blocks_.push_back({Basis::Daubechies, offset, members_.size() - offset, 0, levels - 1, true});
}

void Dictionary::finalize() {
  const auto size = static_cast<Eigen::Index>(members_.size());
  sup_norms_.resize(size);
  l2_norms_.resize(size);
  for (Eigen::Index m = 0; m < size; ++m) {
    const Member& mem = members_[static_cast<std::size_t>(m)];
    switch (mem.family) {
      case Family::Constant: sup_norms_[m] = 1.0; break;
      case Family::Cosine:
      case Family::Sine: sup_norms_[m] = std::numbers::sqrt2; break;
      case Family::HistogramBin:
      case Family::HaarWavelet: sup_norms_[m] = std::sqrt(std::ldexp(1.0, mem.level)); break;
      case Family::DaubechiesWavelet: sup_norms_[m] = detail::daubechies_sup_norm(mem.level); break;
    }
    // Every family is normalized analytically; the Daubechies table is checked
    // against this in the tests.
    l2_norms_[m] = 1.0;
  }
}

bool Dictionary::is_orthonormal() const noexcept {
  for (const auto& b : blocks_)
    if (b.basis != blocks_.front().basis) return false;
  return true;
}

std::string Dictionary::member_name(std::size_t m) const {
  const Member& mem = member(m);
  const auto jk = "[" + std::to_string(mem.level) + "," + std::to_string(mem.shift) + "]";
  switch (mem.family) {
    case Family::Constant: return "const";
    case Family::Cosine: return "cos[" + std::to_string(mem.level) + "]";
    case Family::Sine: return "sin[" + std::to_string(mem.level) + "]";
    case Family::HistogramBin: return "bin" + jk;
    case Family::HaarWavelet: return "haar" + jk;
    case Family::DaubechiesWavelet: return "db3" + jk;
  }
  return "?";
}

double Dictionary::evaluate(std::size_t m, double x) const {
  if (m >= members_.size()) throw std::out_of_range("member index out of range");
  if (!(x >= 0.0 && x <= 1.0)) throw std::out_of_range("evaluation point outside [0, 1]");
  const Member& mem = members_[m];
  switch (mem.family) {
    case Family::Constant: return 1.0;
    case Family::Cosine: return std::numbers::sqrt2 * std::cos(2.0 * std::numbers::pi * mem.level * x);
    case Family::Sine: return std::numbers::sqrt2 * std::sin(2.0 * std::numbers::pi * mem.level * x);
    case Family::HistogramBin:
    case Family::HaarWavelet: {
      const long width = 1L << mem.level;
      const double scaled = std::ldexp(x, mem.level);
      const long k = std::min(static_cast<long>(scaled), width - 1);
      if (k != mem.shift) return 0.0;
      const double amp = std::sqrt(static_cast<double>(width));
      if (mem.family == Family::HistogramBin) return amp;
      return scaled - static_cast<double>(k) < 0.5 ? amp : -amp;
    }
    case Family::DaubechiesWavelet: return detail::daubechies_periodized(mem.level, mem.shift, x);
  }
  return 0.0;
}

std::vector<double> Dictionary::synthesize(const Eigen::VectorXd& lambda, std::span<const double> xs) const {
  if (static_cast<std::size_t>(lambda.size()) != size())
    throw std::invalid_argument("coefficient vector has length " + std::to_string(lambda.size()) +
                                ", dictionary has " + std::to_string(size()) + " members");
  std::vector<double> out(xs.size(), 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] >= 0.0 && xs[i] <= 1.0)) throw std::out_of_range("evaluation point outside [0, 1]");
    double acc = 0.0;
    for_each_nonzero(xs[i], [&](std::size_t m, double v) { acc += lambda[static_cast<Eigen::Index>(m)] * v; });
    out[i] = acc;
  }
  return out;
}

std::vector<Piece> Dictionary::pieces(std::size_t m) const {
  const Member& mem = member(m);
  switch (mem.family) {
    case Family::Constant: return {{0.0, 1.0, 1.0}};
    case Family::HistogramBin: {
      const double w = std::ldexp(1.0, -mem.level);
      return {{mem.shift * w, (mem.shift + 1) * w, std::sqrt(std::ldexp(1.0, mem.level))}};
    }
    case Family::HaarWavelet: {
      const double w = std::ldexp(1.0, -mem.level);
      const double amp = std::sqrt(std::ldexp(1.0, mem.level));
      const double a = mem.shift * w;
      return {{a, a + 0.5 * w, amp}, {a + 0.5 * w, a + w, -amp}};
    }
    default: return {};
  }
}

std::vector<double> Dictionary::breakpoints(std::size_t m) const {
  const Member& mem = member(m);
  std::vector<double> out{0.0, 1.0};
  if (mem.family == Family::DaubechiesWavelet) {
    const double w = std::ldexp(1.0, -mem.level);
    for (int i = 0; i <= 5; ++i) {
      double t = (mem.shift + i) * w;
      t -= std::floor(t);
      out.push_back(t);
    }
  }
  for (const auto& p : pieces(m)) {
    out.push_back(p.a);
    out.push_back(p.b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double Dictionary::integral(std::size_t m, double a, double b) const {
  const Member& mem = member(m);
  switch (mem.family) {
    case Family::Cosine: {
      const double w = 2.0 * std::numbers::pi * mem.level;
      return std::numbers::sqrt2 * (std::sin(w * b) - std::sin(w * a)) / w;
    }
    case Family::Sine: {
      const double w = 2.0 * std::numbers::pi * mem.level;
      return -std::numbers::sqrt2 * (std::cos(w * b) - std::cos(w * a)) / w;
    }
    case Family::DaubechiesWavelet:
      throw std::logic_error("no closed-form integral for Daubechies members");
    default: {
      double acc = 0.0;
      for (const auto& p : pieces(m)) {
        const double lo = std::max(a, p.a);
        const double hi = std::min(b, p.b);
        if (hi > lo) acc += p.value * (hi - lo);
      }
      return acc;
    }
  }
}

}  // namespace sparsedens
