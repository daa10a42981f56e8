#pragma once

#include "sparsedens/dictionary.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>

namespace sparsedens {

/// Symmetric matrix of pairwise L2 inner products of dictionary members.
/// Copies share the underlying storage.
class GramMatrix {
 public:
  GramMatrix() : entries_(std::make_shared<const Eigen::MatrixXd>()) {}
  explicit GramMatrix(Eigen::MatrixXd entries);

  static GramMatrix identity(Eigen::Index size);

  const Eigen::MatrixXd& matrix() const noexcept { return *entries_; }
  Eigen::Index size() const noexcept { return entries_->rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return (*entries_)(i, j); }

 private:
  std::shared_ptr<const Eigen::MatrixXd> entries_;
};

/// <phi_m, phi_m'> in closed form. Members of one orthonormal basis give
/// Kronecker deltas; trigonometric, histogram and Haar members are integrated
/// analytically against each other; pairs involving a Daubechies wavelet and
/// another basis fall back to adaptive quadrature at absolute tolerance 1e-9.
double inner_product(const Dictionary& dict, std::size_t m, std::size_t mp);

/// Inner product by adaptive quadrature of the pointwise product only.
double inner_product_quadrature(const Dictionary& dict, std::size_t m, std::size_t mp, double abs_tol = 1e-10);

GramMatrix compute_gram(const Dictionary& dict);

struct GramSummary {
  double min_eigenvalue;
  double max_eigenvalue;
  double max_off_diagonal;
  double identity_deviation;   // max |G - I|
  double symmetry_deviation;   // max |G - G^T|
};

GramSummary summarize(const GramMatrix& gram);

/// Binary cache file: magic, format version, kind tag, n, M, row-major
/// entries and an FNV-1a checksum of everything before it.
void write_gram_file(const std::filesystem::path& path, DictionaryKind kind, std::size_t n, const GramMatrix& gram);
/// Returns nullopt when the file is missing, truncated, of another version,
/// fails its checksum, or does not match (kind, n, M).
std::optional<GramMatrix> read_gram_file(const std::filesystem::path& path, DictionaryKind kind, std::size_t n,
                                         std::size_t size);

/// Thread-safe memoization of Gram matrices keyed by (kind, n, M), optionally
/// persisted to a directory of cache files.
class GramCache {
 public:
  explicit GramCache(std::filesystem::path directory = {}) : directory_(std::move(directory)) {}

  GramMatrix get(const Dictionary& dict);
  /// Changes where cache files are looked up; in-memory entries are kept.
  void set_directory(std::filesystem::path directory);
  std::filesystem::path directory() const;

  static GramCache& global();

 private:
  std::filesystem::path directory_;
  mutable std::mutex mutex_;
  std::map<std::tuple<int, std::size_t, std::size_t>, GramMatrix> entries_;
};

/// Gram matrix from the process-wide cache.
inline GramMatrix gram(const Dictionary& dict) { return GramCache::global().get(dict); }

inline constexpr std::uint32_t kGramFileVersion = 1;

}  // namespace sparsedens
