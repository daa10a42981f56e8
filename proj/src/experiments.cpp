#include "sparsedens/experiments.hpp"

#include "sparsedens/errors.hpp"
#include "sparsedens/quadrature.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <tuple>

namespace sparsedens {
namespace {

double member_coefficient(const TrueDensity& density, const Dictionary& dict, std::size_t m) {
  const Member& mem = dict.member(m);
  switch (mem.family) {
    case Family::Constant: return density.mass(0.0, 1.0);
    case Family::HistogramBin:
    case Family::HaarWavelet: {
      double acc = 0.0;
      for (const auto& p : dict.pieces(m)) acc += p.value * density.mass(p.a, p.b);
      return acc;
    }
    case Family::DaubechiesWavelet:
      return detail::daubechies_integrate(mem.level, mem.shift, [&](double x) { return density.pdf(x); },
                                          density.breakpoints());
    case Family::Cosine:
    case Family::Sine: {
      std::vector<double> cuts = density.breakpoints();
      const auto own = dict.breakpoints(m);
      cuts.insert(cuts.end(), own.begin(), own.end());
      const double chunk = 1.0 / std::max(1, mem.level);
      return integrate_piecewise([&](double x) { return dict.evaluate(m, x) * density.pdf(x); }, 0.0, 1.0, cuts,
                                 1e-10, chunk);
    }
  }
  return 0.0;
}

void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

}  // namespace

Eigen::VectorXd true_coefficients(const TrueDensity& density, const Dictionary& dict) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(dict.size()));
  for (std::size_t m = 0; m < dict.size(); ++m) out[static_cast<Eigen::Index>(m)] = member_coefficient(density, dict, m);
  return out;
}

Eigen::VectorXd cached_true_coefficients(const TrueDensity& density, const Dictionary& dict) {
  using Key = std::tuple<int, int, std::size_t, std::size_t>;
  static std::mutex mutex;
  static std::map<Key, Eigen::VectorXd> cache;
  const Key key{static_cast<int>(density.id()), static_cast<int>(dict.kind()), dict.sample_size(), dict.size()};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  Eigen::VectorXd beta0 = true_coefficients(density, dict);
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(beta0)).first->second;
}

double l2_risk(const GramMatrix& gram, const Eigen::VectorXd& beta0, double f0_norm_sq, const Eigen::VectorXd& lambda) {
  if (lambda.size() != gram.size() || beta0.size() != gram.size())
    throw std::invalid_argument("l2_risk: dimension mismatch");
  return std::max(0.0, lambda.dot(gram.matrix() * lambda) - 2.0 * lambda.dot(beta0) + f0_norm_sq);
}

double l2_risk(const TrueDensity& density, const Dictionary& dict, const Eigen::VectorXd& lambda) {
  if (static_cast<std::size_t>(lambda.size()) != dict.size()) throw std::invalid_argument("l2_risk: dimension mismatch");
  const Eigen::VectorXd beta0 = cached_true_coefficients(density, dict);
  if (dict.is_orthonormal())
    return std::max(0.0, lambda.squaredNorm() - 2.0 * lambda.dot(beta0) + density.l2_norm_sq());
  return l2_risk(gram(dict), beta0, density.l2_norm_sq(), lambda);
}

Estimate estimate(const SampleMoments& moments, const Dictionary& dict, const GramMatrix& gram, Method method,
                  double gamma, double density_sup, const SolverOptions& options) {
  Estimate out;
  if (method == Method::DantzigNonAdaptive) {
    if (!(density_sup > 0.0)) throw ConfigError("the non-adaptive threshold needs the density sup-norm");
    out.stats = non_adaptive_stats(moments, dict.sup_norms(), gamma, density_sup);
  } else {
    out.stats = empirical_stats(moments, dict.sup_norms(), gamma);
  }

  auto certified = [](SolveResult r, const char* what) {
    if (r.report.status != SolverStatus::Optimal)
      throw SolverError(std::string(what) + " solver stopped with status " + std::string(to_string(r.report.status)));
    return r;
  };

  switch (method) {
    case Method::SoftThreshold: {
      out.coefficients = soft_threshold_estimate(out.stats.beta_hat, out.stats.eta);
      const Eigen::VectorXd resid = out.coefficients.values - out.stats.beta_hat;
      out.report.max_constraint_violation = std::max(0.0, (resid.cwiseAbs() - out.stats.eta).maxCoeff());
      out.report.objective = out.coefficients.l1_norm;
      break;
    }
    case Method::Lasso: {
      auto r = certified(lasso_solve({gram, out.stats.beta_hat, out.stats.eta}, options), "Lasso");
      out.coefficients = std::move(r.coefficients);
      out.report = r.report;
      break;
    }
    case Method::Dantzig:
    case Method::DantzigNonAdaptive:
    case Method::DantzigLS: {
      auto r = certified(dantzig_solve({gram, out.stats.beta_hat, out.stats.eta}, options), "Dantzig");
      r.coefficients.method = method;
      out.report = r.report;
      if (method == Method::DantzigLS) {
        out.coefficients = two_step_refit(gram, out.stats.beta_hat, r.coefficients.support);
        out.first_stage = std::move(r.coefficients);
        out.first_stage_report = r.report;
      } else {
        out.coefficients = std::move(r.coefficients);
      }
      break;
    }
  }
  return out;
}

void ExperimentConfig::validate() const {
  require(n >= 16, "n must be at least 16");
  require(gamma > 0.0 && std::isfinite(gamma), "gamma must be positive");
  require(replications >= 1, "replications must be at least 1");
  require(threads >= 1, "threads must be at least 1");
  require(method != Method::SoftThreshold ||
              Dictionary::build(dictionary, n).is_orthonormal(),
          "soft thresholding needs an orthonormal dictionary");
}

BoxplotStats boxplot_stats(std::vector<double> values) {
  BoxplotStats b;
  b.count = values.size();
  if (values.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    b.mean = b.min = b.q1 = b.median = b.q3 = b.max = b.whisker_low = b.whisker_high = nan;
    return b;
  }
  std::sort(values.begin(), values.end());
  auto q = [&](double p) {
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  double sum = 0.0;
  for (double v : values) sum += v;
  b.mean = sum / static_cast<double>(values.size());
  b.min = values.front();
  b.max = values.back();
  b.q1 = q(0.25);
  b.median = q(0.5);
  b.q3 = q(0.75);
  const double iqr = b.q3 - b.q1;
  b.whisker_low = *std::lower_bound(values.begin(), values.end(), b.q1 - 1.5 * iqr);
  b.whisker_high = *(std::upper_bound(values.begin(), values.end(), b.q3 + 1.5 * iqr) - 1);
  return b;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
  const auto workers = static_cast<std::size_t>(std::max(1u, threads));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const TrueDensity density = TrueDensity::make(config.density);
  const Dictionary dict = Dictionary::build(config.dictionary, config.n);
  const GramMatrix g = gram(dict);
  const Eigen::VectorXd beta0 = cached_true_coefficients(density, dict);

  RunResult result;
  result.config = config;
  result.records.resize(config.replications);
  parallel_for(config.replications, config.threads, [&](std::size_t r) {
    ReplicationRecord& rec = result.records[r];
    rec.index = r;
    rec.seed = derive_seed(config.seed, r);
    try {
      const Sample sample = density.sample(config.n, rec.seed);
      const SampleMoments moments = sample_moments(sample, dict);
      const Estimate est = estimate(moments, dict, g, config.method, config.gamma, density.sup_norm(), config.solver);
      rec.risk = l2_risk(g, beta0, density.l2_norm_sq(), est.coefficients.values);
      rec.support_size = est.coefficients.support.size();
      rec.l1_norm = est.coefficients.l1_norm;
      rec.status = est.report.status;
      rec.ok = true;
    } catch (const Error& e) {
      rec.error = e.what();
      if (dynamic_cast<const SolverError*>(&e)) rec.status = SolverStatus::MaxIter;
    }
  });

  std::vector<double> risks;
  for (const auto& rec : result.records) {
    if (rec.ok) risks.push_back(rec.risk);
    else ++result.failures;
  }
  result.risk = boxplot_stats(std::move(risks));
  return result;
}

CalibrationConfig CalibrationConfig::defaults() {
  CalibrationConfig c;
  for (int i = 1; i <= 15; ++i) c.gammas.push_back(0.1 * i);
  for (int j = 4; j <= 10; ++j) c.js.push_back(j);
  return c;
}

void CalibrationConfig::validate() const {
  require(!gammas.empty(), "the gamma grid is empty");
  for (double g : gammas) require(g > 0.0 && std::isfinite(g), "gamma values must be positive");
  require(!js.empty(), "the J list is empty");
  for (int j : js) require(j >= 2 && j <= 20, "J must lie in [2, 20]");
  require(replications >= 1, "replications must be at least 1");
  require(threads >= 1, "threads must be at least 1");
}

CalibrationResult calibration_sweep(const CalibrationConfig& config) {
  config.validate();
  const TrueDensity density = TrueDensity::make(DensityId::Uniform);
  CalibrationResult result;
  for (int j : config.js) {
    const std::size_t n = std::size_t{1} << j;
    const Dictionary dict = Dictionary::haar(j, n);
    const Eigen::VectorXd beta0 = cached_true_coefficients(density, dict);
    const std::uint64_t level_seed = derive_seed(config.seed, static_cast<std::uint64_t>(j));
    std::vector<std::vector<double>> risks(config.replications, std::vector<double>(config.gammas.size()));
    parallel_for(config.replications, config.threads, [&](std::size_t r) {
      const Sample sample = density.sample(n, derive_seed(level_seed, r));
      const SampleMoments moments = sample_moments(sample, dict);
      for (std::size_t g = 0; g < config.gammas.size(); ++g) {
        const EmpiricalStats stats = empirical_stats(moments, dict.sup_norms(), config.gammas[g]);
        const CoefficientVector lambda = soft_threshold_estimate(stats.beta_hat, stats.eta);
        risks[r][g] = std::max(
            0.0, lambda.values.squaredNorm() - 2.0 * lambda.values.dot(beta0) + density.l2_norm_sq());
      }
    });
    double best = std::numeric_limits<double>::infinity();
    double best_gamma = config.gammas.front();
    for (std::size_t g = 0; g < config.gammas.size(); ++g) {
      double sum = 0.0;
      for (const auto& row : risks) sum += row[g];
      const double mean = sum / static_cast<double>(config.replications);
      result.rows.push_back({config.gammas[g], j, n, mean, std::log2(mean)});
      if (mean < best) best = mean, best_gamma = config.gammas[g];
    }
    result.gamma_min.emplace_back(j, best_gamma);
  }
  return result;
}

void BenchmarkConfig::validate() const {
  require(n >= 16, "n must be at least 16");
  require(gamma > 0.0 && std::isfinite(gamma), "gamma must be positive");
  require(replications >= 1, "replications must be at least 1");
  require(threads >= 1, "threads must be at least 1");
  require(!densities.empty() && !dictionaries.empty(), "the benchmark grid is empty");
}

const std::vector<BenchmarkPanel>& benchmark_panels() {
  static const std::vector<BenchmarkPanel> panels{
      {"dantzig-lasso", Method::Dantzig, Method::Lasso},
      {"adaptive-nonadaptive", Method::Dantzig, Method::DantzigNonAdaptive},
      {"dantzig-ls", Method::Dantzig, Method::DantzigLS},
  };
  return panels;
}

const BenchmarkCell& BenchmarkResult::cell(DensityId density, DictionaryKind dictionary, Method method) const {
  for (const auto& c : cells)
    if (c.density == density && c.dictionary == dictionary && c.method == method) return c;
  throw std::out_of_range("no such benchmark cell");
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
  config.validate();
  constexpr std::size_t kMethods = std::size(kBenchmarkMethods);
  BenchmarkResult result;
  result.config = config;
  for (DensityId id : config.densities) {
    const TrueDensity density = TrueDensity::make(id);
    for (DictionaryKind kind : config.dictionaries) {
      const Dictionary dict = Dictionary::build(kind, config.n);
      const GramMatrix g = gram(dict);
      const Eigen::VectorXd beta0 = cached_true_coefficients(density, dict);
      std::vector<std::array<ReplicationRecord, kMethods>> recs(config.replications);

      parallel_for(config.replications, config.threads, [&](std::size_t r) {
        const std::uint64_t seed = derive_seed(config.seed, r);
        for (std::size_t k = 0; k < kMethods; ++k) recs[r][k].index = r, recs[r][k].seed = seed;
        const Sample sample = density.sample(config.n, seed);
        const SampleMoments moments = sample_moments(sample, dict);
        const EmpiricalStats adaptive = empirical_stats(moments, dict.sup_norms(), config.gamma);
        const EmpiricalStats fixed = non_adaptive_stats(moments, dict.sup_norms(), config.gamma, density.sup_norm());

        auto record = [&](ReplicationRecord& rec, const CoefficientVector& c, SolverStatus status) {
          rec.status = status;
          rec.ok = status == SolverStatus::Optimal;
          if (!rec.ok) rec.error = "solver stopped with status " + std::string(to_string(status));
          rec.risk = l2_risk(g, beta0, density.l2_norm_sq(), c.values);
          rec.support_size = c.support.size();
          rec.l1_norm = c.l1_norm;
        };
        auto guarded = [&](ReplicationRecord& rec, auto&& body) {
          try {
            body();
          } catch (const Error& e) {
            rec.ok = false;
            rec.error = e.what();
          }
        };

        std::optional<SolveResult> dantzig;
        guarded(recs[r][0], [&] {
          dantzig = dantzig_solve({g, adaptive.beta_hat, adaptive.eta}, config.solver);
          record(recs[r][0], dantzig->coefficients, dantzig->report.status);
        });
        guarded(recs[r][1], [&] {
          const auto lasso = lasso_solve({g, adaptive.beta_hat, adaptive.eta}, config.solver);
          record(recs[r][1], lasso.coefficients, lasso.report.status);
        });
        guarded(recs[r][2], [&] {
          const auto na = dantzig_solve({g, fixed.beta_hat, fixed.eta}, config.solver);
          record(recs[r][2], na.coefficients, na.report.status);
        });
        guarded(recs[r][3], [&] {
          if (!dantzig || !recs[r][0].ok) throw SolverError("no certified Dantzig support to refit");
          const auto refit = two_step_refit(g, adaptive.beta_hat, dantzig->coefficients.support);
          record(recs[r][3], refit, SolverStatus::Optimal);
        });
      });

      for (std::size_t k = 0; k < kMethods; ++k) {
        BenchmarkCell cell{id, kind, kBenchmarkMethods[k], {}, {}, 0};
        std::vector<double> risks;
        for (auto& row : recs) {
          if (row[k].ok) risks.push_back(row[k].risk);
          else ++cell.failures;
          cell.records.push_back(std::move(row[k]));
        }
        cell.risk = boxplot_stats(std::move(risks));
        result.cells.push_back(std::move(cell));
      }
    }
  }
  return result;
}

}  // namespace sparsedens
