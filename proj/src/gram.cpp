#include "sparsedens/gram.hpp"

#include "sparsedens/errors.hpp"
#include "sparsedens/hash.hpp"
#include "sparsedens/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace sparsedens {

GramMatrix::GramMatrix(Eigen::MatrixXd entries)
    : entries_(std::make_shared<const Eigen::MatrixXd>(std::move(entries))) {
  if (entries_->rows() != entries_->cols()) throw std::invalid_argument("Gram matrix must be square");
}

GramMatrix GramMatrix::identity(Eigen::Index size) { return GramMatrix(Eigen::MatrixXd::Identity(size, size)); }

namespace {

bool is_trigonometric(const Member& m) { return m.family == Family::Cosine || m.family == Family::Sine; }

double piecewise_product(const std::vector<Piece>& p, const std::vector<Piece>& q) {
  double acc = 0.0;
  for (const auto& a : p)
    for (const auto& b : q) {
      const double lo = std::max(a.a, b.a);
      const double hi = std::min(a.b, b.b);
      if (hi > lo) acc += a.value * b.value * (hi - lo);
    }
  return acc;
}

}  // namespace

double inner_product_quadrature(const Dictionary& dict, std::size_t m, std::size_t mp, double abs_tol) {
  auto cuts = dict.breakpoints(m);
  const auto more = dict.breakpoints(mp);
  cuts.insert(cuts.end(), more.begin(), more.end());
  const int freq = std::max(is_trigonometric(dict.member(m)) ? dict.member(m).level : 0,
                            is_trigonometric(dict.member(mp)) ? dict.member(mp).level : 0);
  // Keep at most a couple of oscillations per panel.
  const double chunk = 1.0 / std::max(1, freq);
  return integrate_piecewise([&](double x) { return dict.evaluate(m, x) * dict.evaluate(mp, x); }, 0.0, 1.0, cuts,
                             abs_tol, chunk);
}

double inner_product(const Dictionary& dict, std::size_t m, std::size_t mp) {
  const Member& a = dict.member(m);
  const Member& b = dict.member(mp);
  if (a.basis == b.basis) return m == mp ? 1.0 : 0.0;
  if (a.family == Family::DaubechiesWavelet || b.family == Family::DaubechiesWavelet) {
    try {
      return inner_product_quadrature(dict, m, mp, 1e-9);
    } catch (const QuadratureError& e) {
      std::ostringstream msg;
      msg << "Gram entry (" << dict.member_name(m) << ", " << dict.member_name(mp) << "): " << e.what();
      throw QuadratureError(msg.str());
    }
  }
  if (is_trigonometric(a) || is_trigonometric(b)) {
    const std::size_t trig = is_trigonometric(a) ? m : mp;
    const std::size_t other = trig == m ? mp : m;
    double acc = 0.0;
    for (const auto& p : dict.pieces(other)) acc += p.value * dict.integral(trig, p.a, p.b);
    return acc;
  }
  return piecewise_product(dict.pieces(m), dict.pieces(mp));
}

GramMatrix compute_gram(const Dictionary& dict) {
  const auto size = static_cast<Eigen::Index>(dict.size());
  Eigen::MatrixXd g(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    g(i, i) = inner_product(dict, static_cast<std::size_t>(i), static_cast<std::size_t>(i));
    for (Eigen::Index j = i + 1; j < size; ++j) {
      const double v = inner_product(dict, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return GramMatrix(std::move(g));
}

GramSummary summarize(const GramMatrix& gram) {
  const auto& g = gram.matrix();
  GramSummary s{};
  const auto size = g.rows();
  s.symmetry_deviation = size ? (g - g.transpose()).cwiseAbs().maxCoeff() : 0.0;
  s.identity_deviation = size ? (g - Eigen::MatrixXd::Identity(size, size)).cwiseAbs().maxCoeff() : 0.0;
  double off = 0.0;
  for (Eigen::Index i = 0; i < size; ++i)
    for (Eigen::Index j = 0; j < size; ++j)
      if (i != j) off = std::max(off, std::abs(g(i, j)));
  s.max_off_diagonal = off;
  if (size) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
    s.min_eigenvalue = es.eigenvalues().minCoeff();
    s.max_eigenvalue = es.eigenvalues().maxCoeff();
  }
  return s;
}

// ---------------------------------------------------------------------------
// Cache files

namespace {

constexpr std::array<char, 8> kMagic = {'S', 'D', 'G', 'R', 'A', 'M', '\0', '\1'};

struct Header {
  std::array<char, 8> magic;
  std::uint32_t version;
  std::uint32_t kind;
  std::uint64_t n;
  std::uint64_t size;
};

}  // namespace

void write_gram_file(const std::filesystem::path& path, DictionaryKind kind, std::size_t n, const GramMatrix& gram) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  Header h{kMagic, kGramFileVersion, static_cast<std::uint32_t>(kind), n, static_cast<std::uint64_t>(gram.size())};
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = gram.matrix();
  Fnv1a hash;
  hash.update(&h, sizeof h);
  hash.update(rows.data(), sizeof(double) * static_cast<std::size_t>(rows.size()));
  const std::uint64_t checksum = hash.digest();

  const auto tmp = std::filesystem::path(path).concat(".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write Gram cache file " + tmp.string());
    out.write(reinterpret_cast<const char*>(&h), sizeof h);
    out.write(reinterpret_cast<const char*>(rows.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(rows.size())));
    out.write(reinterpret_cast<const char*>(&checksum), sizeof checksum);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<GramMatrix> read_gram_file(const std::filesystem::path& path, DictionaryKind kind, std::size_t n,
                                         std::size_t size) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  Header h{};
  if (!in.read(reinterpret_cast<char*>(&h), sizeof h)) return std::nullopt;
  if (h.magic != kMagic || h.version != kGramFileVersion || h.kind != static_cast<std::uint32_t>(kind) || h.n != n ||
      h.size != size)
    return std::nullopt;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(static_cast<Eigen::Index>(size),
                                                                              static_cast<Eigen::Index>(size));
  const auto bytes = static_cast<std::streamsize>(sizeof(double) * size * size);
  if (!in.read(reinterpret_cast<char*>(rows.data()), bytes)) return std::nullopt;
  std::uint64_t checksum = 0;
  if (!in.read(reinterpret_cast<char*>(&checksum), sizeof checksum)) return std::nullopt;
  Fnv1a hash;
  hash.update(&h, sizeof h);
  hash.update(rows.data(), static_cast<std::size_t>(bytes));
  if (hash.digest() != checksum) return std::nullopt;
  return GramMatrix(Eigen::MatrixXd(rows));
}

GramMatrix GramCache::get(const Dictionary& dict) {
  const auto key = std::make_tuple(static_cast<int>(dict.kind()), dict.sample_size(), dict.size());
  std::lock_guard lock(mutex_);
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;

  std::filesystem::path file;
  if (!directory_.empty()) {
    file = directory_ / ("gram_" + std::string(to_string(dict.kind())) + "_" + std::to_string(dict.sample_size()) +
                         "_" + std::to_string(dict.size()) + ".bin");
    if (auto cached = read_gram_file(file, dict.kind(), dict.sample_size(), dict.size())) {
      entries_.emplace(key, *cached);
      return *cached;
    }
  }
  GramMatrix g = compute_gram(dict);
  if (!file.empty()) write_gram_file(file, dict.kind(), dict.sample_size(), g);
  entries_.emplace(key, g);
  return g;
}

void GramCache::set_directory(std::filesystem::path directory) {
  std::lock_guard lock(mutex_);
  directory_ = std::move(directory);
}

std::filesystem::path GramCache::directory() const {
  std::lock_guard lock(mutex_);
  return directory_;
}

GramCache& GramCache::global() {
  static GramCache cache;
  return cache;
}

}  // namespace sparsedens
