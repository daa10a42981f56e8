#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sparsedens {

enum class DictionaryKind { Fourier, Histogram, Haar, Daubechies, Mix, Mix2 };

std::string_view to_string(DictionaryKind kind);
/// Accepts the short names used on the command line: fou, hist, haar, wav, mix, mix2.
DictionaryKind parse_dictionary_kind(std::string_view name);

/// Orthonormal basis a member is drawn from. Members of the same basis are
/// orthonormal to each other; cross-basis inner products must be computed.
enum class Basis { Fourier, Histogram, Haar, Daubechies };

enum class Family { Constant, Cosine, Sine, HistogramBin, HaarWavelet, DaubechiesWavelet };

struct Member {
  Basis basis;
  Family family;
  int level = 0;  // frequency for trigonometric members, dyadic level otherwise
  int shift = 0;  // translation index k
};

/// A constant piece v on [a, b) of a piecewise-constant member.
struct Piece {
  double a;
  double b;
  double value;
};

/// A finite family of unit-norm functions on [0, 1].
///
/// A dictionary is a concatenation of blocks, each drawn from one orthonormal
/// basis: the trigonometric system, a dyadic histogram, a range of Haar
/// levels, or periodized Daubechies wavelets with three vanishing moments.
/// Instances are immutable and safe to share between threads.
class Dictionary {
 public:
  /// Builds one of the six standard dictionaries sized for sample size n.
  ///
  ///  - Fourier:    constant plus cos/sin pairs up to frequency n/2, M = 2*floor(n/2)+1
  ///  - Histogram:  2^j0 bins with sqrt(n)/2 <= 2^j0 < sqrt(n)
  ///  - Haar:       M = 2^j1 members with n/2 <= 2^j1 < n
  ///  - Daubechies: M = 2^j1 periodized wavelets, same sizing as Haar
  ///  - Mix:        Fourier and Histogram
  ///  - Mix2:       Fourier, Histogram and Haar levels j0..j1-1
  static Dictionary build(DictionaryKind kind, std::size_t n);

  /// The full Haar system with levels -1..resolution-1, i.e. M = 2^resolution.
  static Dictionary haar(int resolution, std::size_t n);

  DictionaryKind kind() const noexcept { return kind_; }
  std::size_t sample_size() const noexcept { return n_; }
  std::size_t size() const noexcept { return members_.size(); }
  int histogram_level() const noexcept { return j0_; }
  int wavelet_level() const noexcept { return j1_; }
  bool is_orthonormal() const noexcept;

  const std::vector<Member>& members() const noexcept { return members_; }
  const Member& member(std::size_t m) const { return members_.at(m); }
  std::string member_name(std::size_t m) const;

  /// phi_m(x). Throws std::out_of_range for m >= M or x outside [0, 1].
  double evaluate(std::size_t m, double x) const;

  /// Calls f(m, phi_m(x)) for every member that may be nonzero at x. Members
  /// not visited are exactly zero at x.
  template <class F>
  void for_each_nonzero(double x, F&& f) const;

  /// Pointwise values of f_lambda = sum_m lambda_m phi_m.
  std::vector<double> synthesize(const Eigen::VectorXd& lambda, std::span<const double> xs) const;

  const Eigen::VectorXd& sup_norms() const noexcept { return sup_norms_; }
  const Eigen::VectorXd& l2_norms() const noexcept { return l2_norms_; }

  /// Pieces of a histogram or Haar member; empty for other families.
  std::vector<Piece> pieces(std::size_t m) const;
  /// Points in [0, 1] where phi_m is not smooth (including 0 and 1).
  std::vector<double> breakpoints(std::size_t m) const;
  /// Closed-form integral of phi_m over [a, b] for every family except Daubechies.
  double integral(std::size_t m, double a, double b) const;

 private:
  struct Block {
    Basis basis;
    std::size_t offset;
    std::size_t count;
    int first_level;  // Fourier: unused; Haar/Daubechies: first wavelet level
    int last_level;   // inclusive; Fourier: highest frequency
    bool constant;    // block starts with a constant member
  };

  Dictionary() = default;
  void add_fourier(int max_frequency);
  void add_histogram(int level);
  void add_haar(int first_level, int last_level, bool with_constant);
  void add_daubechies(int levels);
  void finalize();

  template <class F>
  void visit_block(const Block& block, double x, F& f) const;

  DictionaryKind kind_ = DictionaryKind::Haar;
  std::size_t n_ = 0;
  int j0_ = 0;
  int j1_ = 0;
  std::vector<Block> blocks_;
  std::vector<Member> members_;
  Eigen::VectorXd sup_norms_;
  Eigen::VectorXd l2_norms_;
};

/// Largest j with sqrt(n)/2 <= 2^j < sqrt(n).
int histogram_resolution(std::size_t n);
/// Largest j with n/2 <= 2^j < n.
int wavelet_resolution(std::size_t n);

namespace detail {
/// Periodized Daubechies wavelet 2^(j/2) psi(2^j x - k) summed over integer shifts.
double daubechies_periodized(int level, int shift, double x);
double daubechies_sup_norm(int level);
/// int_0^1 phi_jk g for the periodized wavelet, by a two-point Gauss rule on
/// each cell of the cascade grid split at the given breakpoints of g.
double daubechies_integrate(int level, int shift, const std::function<double(double)>& g,
                            std::span<const double> breakpoints);
}  // namespace detail

// ---------------------------------------------------------------------------

template <class F>
void Dictionary::for_each_nonzero(double x, F&& f) const {
  for (const auto& block : blocks_) visit_block(block, x, f);
}

template <class F>
void Dictionary::visit_block(const Block& block, double x, F& f) const {
  std::size_t m = block.offset;
  switch (block.basis) {
    case Basis::Fourier: {
      f(m++, 1.0);
      constexpr double kTwoPi = 6.283185307179586476925286766559;
      const double c1 = std::cos(kTwoPi * x);
      const double s1 = std::sin(kTwoPi * x);
      double c = c1;
      double s = s1;
      constexpr double kSqrt2 = 1.4142135623730950488016887242097;
      for (int k = 1; k <= block.last_level; ++k) {
        f(m++, kSqrt2 * c);
        f(m++, kSqrt2 * s);
        // Resynchronise the rotation recurrence periodically.
        if (k % 64 == 63) {
          c = std::cos(kTwoPi * (k + 1) * x);
          s = std::sin(kTwoPi * (k + 1) * x);
        } else {
          const double cn = c * c1 - s * s1;
          s = s * c1 + c * s1;
          c = cn;
        }
      }
      break;
    }
    case Basis::Histogram: {
      const int j = block.first_level;
      const double bins = std::ldexp(1.0, j);
      const auto k = std::min(static_cast<std::size_t>(x * bins), block.count - 1);
      f(m + k, std::sqrt(bins));
      break;
    }
    case Basis::Haar: {
      if (block.constant) f(m++, 1.0);
      for (int j = block.first_level; j <= block.last_level; ++j) {
        const std::size_t width = std::size_t{1} << j;
        const double scaled = std::ldexp(x, j);
        const auto k = std::min(static_cast<std::size_t>(scaled), width - 1);
        const double frac = scaled - static_cast<double>(k);
        const double amp = std::sqrt(static_cast<double>(width));
        f(m + k, frac < 0.5 ? amp : -amp);
        m += width;
      }
      break;
    }
    case Basis::Daubechies: {
      if (block.constant) f(m++, 1.0);
      for (int j = 0; j <= block.last_level; ++j) {
        const int width = 1 << j;
        for (int k = 0; k < width; ++k) f(m + static_cast<std::size_t>(k), detail::daubechies_periodized(j, k, x));
        m += static_cast<std::size_t>(width);
      }
      break;
    }
  }
}

}  // namespace sparsedens
