#pragma once

#include "sparsedens/density.hpp"
#include "sparsedens/dictionary.hpp"
#include "sparsedens/empirical.hpp"
#include "sparsedens/gram.hpp"
#include "sparsedens/solvers.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sparsedens {

/// beta_0,m = int phi_m f_0. Piecewise-constant members use differences of
/// the distribution function; other members are integrated numerically to 1e-9.
Eigen::VectorXd true_coefficients(const TrueDensity& density, const Dictionary& dict);
/// Memoized by (density, dictionary kind, n, M).
Eigen::VectorXd cached_true_coefficients(const TrueDensity& density, const Dictionary& dict);

/// ||f_lambda - f_0||^2 = lambda' G lambda - 2 lambda' beta_0 + ||f_0||^2.
double l2_risk(const GramMatrix& gram, const Eigen::VectorXd& beta0, double f0_norm_sq, const Eigen::VectorXd& lambda);
/// Uses G = I without forming it when the dictionary is orthonormal.
double l2_risk(const TrueDensity& density, const Dictionary& dict, const Eigen::VectorXd& lambda);

/// Everything one estimation pass produces.
struct Estimate {
  CoefficientVector coefficients;
  SolverReport report;
  EmpiricalStats stats;
  /// Dantzig stage preceding the least-squares refit.
  std::optional<CoefficientVector> first_stage;
  std::optional<SolverReport> first_stage_report;
};

/// Steps 2-4 of the scheme for one sample: thresholds, then the chosen
/// estimator. density_sup is only used by the non-adaptive method.
Estimate estimate(const SampleMoments& moments, const Dictionary& dict, const GramMatrix& gram, Method method,
                  double gamma, double density_sup = 0.0, const SolverOptions& options = {});

struct ExperimentConfig {
  DensityId density = DensityId::Uniform;
  DictionaryKind dictionary = DictionaryKind::Haar;
  std::size_t n = 500;
  double gamma = 1.01;
  Method method = Method::Dantzig;
  std::size_t replications = 1;
  std::uint64_t seed = 1;
  SolverOptions solver;
  unsigned threads = 1;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

struct ReplicationRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  double risk = 0.0;
  std::size_t support_size = 0;
  double l1_norm = 0.0;
  SolverStatus status = SolverStatus::Optimal;
  std::string error;
};

/// Boxplot statistics with Tukey whiskers at 1.5 IQR. Quartiles use linear
/// interpolation between order statistics.
struct BoxplotStats {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
};

BoxplotStats boxplot_stats(std::vector<double> values);

struct RunResult {
  ExperimentConfig config;
  std::vector<ReplicationRecord> records;
  BoxplotStats risk;  // over successful replications
  std::size_t failures = 0;
};

/// Runs `count` independent tasks on up to `threads` workers. Each task
/// writes only its own slot, so results never depend on scheduling.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task);

RunResult run_experiment(const ExperimentConfig& config);

struct CalibrationConfig {
  std::vector<double> gammas;
  std::vector<int> js;  // n = 2^J
  std::size_t replications = 20;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  /// gamma in {0.1, 0.2, ..., 1.5}, J in {4, ..., 10}, 20 replications.
  static CalibrationConfig defaults();
  void validate() const;
};

struct CalibrationRow {
  double gamma;
  int j;
  std::size_t n;
  double mean_risk;
  double log2_mean_risk;
};

struct CalibrationResult {
  std::vector<CalibrationRow> rows;  // ordered by J, then gamma
  std::vector<std::pair<int, double>> gamma_min;  // (J, minimizing gamma)
};

/// Uniform density, full Haar system with M = n, soft thresholding. Every
/// gamma is applied to the same samples.
CalibrationResult calibration_sweep(const CalibrationConfig& config);

/// Comparison panels: Dantzig vs Lasso, adaptive vs non-adaptive Dantzig,
/// Dantzig vs Dantzig followed by the least-squares refit.
struct BenchmarkConfig {
  std::vector<DensityId> densities{DensityId::F1, DensityId::F2, DensityId::F3, DensityId::F4};
  std::vector<DictionaryKind> dictionaries{DictionaryKind::Fourier, DictionaryKind::Histogram,
                                           DictionaryKind::Haar,    DictionaryKind::Daubechies,
                                           DictionaryKind::Mix,     DictionaryKind::Mix2};
  std::size_t n = 500;
  double gamma = 1.01;
  std::size_t replications = 100;
  std::uint64_t seed = 1;
  SolverOptions solver;
  unsigned threads = 1;

  void validate() const;
};

inline constexpr Method kBenchmarkMethods[] = {Method::Dantzig, Method::Lasso, Method::DantzigNonAdaptive,
                                               Method::DantzigLS};

struct BenchmarkCell {
  DensityId density;
  DictionaryKind dictionary;
  Method method;
  std::vector<ReplicationRecord> records;
  BoxplotStats risk;
  std::size_t failures = 0;
};

struct BenchmarkPanel {
  std::string name;
  Method left;
  Method right;
};

/// dantzig-lasso, adaptive-nonadaptive, dantzig-ls.
const std::vector<BenchmarkPanel>& benchmark_panels();

struct BenchmarkResult {
  BenchmarkConfig config;
  std::vector<BenchmarkCell> cells;  // density-major, then dictionary, then method

  const BenchmarkCell& cell(DensityId density, DictionaryKind dictionary, Method method) const;
};

/// All four estimators are computed on the same samples for every
/// (density, dictionary) pair.
BenchmarkResult run_benchmark(const BenchmarkConfig& config);

}  // namespace sparsedens
