#include "sparsedens/cli.hpp"

#include "sparsedens/analysis.hpp"
#include "sparsedens/density.hpp"
#include "sparsedens/dictionary.hpp"
#include "sparsedens/empirical.hpp"
#include "sparsedens/errors.hpp"
#include "sparsedens/experiments.hpp"
#include "sparsedens/gram.hpp"
#include "sparsedens/hash.hpp"
#include "sparsedens/serialization.hpp"
#include "sparsedens/solvers.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace sparsedens {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
  std::string out_dir = "sparsedens-out";
  std::string cache_dir;
  unsigned threads = 1;
  int verbose = 0;
};

struct EstimateArgs {
  std::string density = "uniform";
  std::string data;
  std::string dict = "haar";
  std::size_t n = 500;
  double gamma = 1.01;
  std::string method = "dantzig";
  std::uint64_t seed = 1;
  std::size_t max_iter = 0;  // 0: solver defaults
};

struct CalibrateArgs {
  std::vector<double> gammas = CalibrationConfig::defaults().gammas;
  std::vector<int> js = CalibrationConfig::defaults().js;
  std::size_t reps = 20;
  std::uint64_t seed = 1;
};

struct BenchmarkArgs {
  std::vector<std::string> densities{"f1", "f2", "f3", "f4"};
  std::vector<std::string> dicts{"fou", "hist", "haar", "wav", "mix", "mix2"};
  std::size_t n = 500;
  double gamma = 1.01;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
};

struct AnalyzeArgs {
  std::string dict = "haar";
  std::size_t n = 16;
  std::size_t s = 1;
  std::size_t l = 0;  // 0: same as s
  std::size_t l_max = 0;
  double budget = kDefaultSubsetBudget;
};

struct GramArgs {
  std::string dict = "haar";
  std::size_t n = 64;
};

/// Canonical "key=value;" text of the effective configuration.
class Canonical {
 public:
  explicit Canonical(std::string_view command) { text_ << command << ';'; }
  template <class T>
  Canonical& add(std::string_view key, const T& value) {
    text_ << key << '=';
    put(value);
    text_ << ';';
    return *this;
  }
  std::uint64_t digest() const {
    Fnv1a h;
    h.update(text_.str());
    return h.digest();
  }

 private:
  void put(double v) { text_ << format_double(v); }
  void put(const std::string& v) { text_ << v; }
  template <class T>
  void put(const T& v) {
    if constexpr (requires { v.begin(); }) {
      for (const auto& x : v) {
        put(x);
        text_ << ',';
      }
    } else {
      text_ << v;
    }
  }
  std::ostringstream text_;
};

template <class F>
auto config_guard(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(e.what());
  }
}

std::ofstream open_output(const Common& common, const std::string& name) {
  std::error_code ec;
  fs::create_directories(common.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + common.out_dir + "': " + ec.message());
  const fs::path path = fs::path(common.out_dir) / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

void write_json(const Common& common, const std::string& name, const json& j) {
  auto out = open_output(common, name);
  out << j.dump(2) << '\n';
}

std::vector<double> read_data_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read data file '" + path + "'");
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string token;
    while (fields >> token) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) throw ConfigError("data file '" + path + "' has a non-numeric entry '" + token + "'");
      values.push_back(v);
    }
  }
  return values;
}

void check_positive_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be positive");
}

int cmd_estimate(const Common& common, const EstimateArgs& a, std::ostream& out, std::ostream& err) {
  check_positive_gamma(a.gamma);
  const Method method = config_guard([&] { return parse_method(a.method); });
  const DictionaryKind kind = config_guard([&] { return parse_dictionary_kind(a.dict); });
  const bool synthetic = a.data.empty();
  const TrueDensity density = TrueDensity::make(config_guard([&] { return parse_density(a.density); }));

  Canonical canon("estimate");
  if (synthetic) canon.add("density", std::string(density.name())).add("n", a.n).add("seed", a.seed);
  else canon.add("data", a.data);
  canon.add("dict", std::string(to_string(kind)))
      .add("gamma", a.gamma)
      .add("method", std::string(to_string(method)))
      .add("max_iter", a.max_iter);
  const OutputHeader header{"estimate", canon.digest()};

  Sample sample;
  if (synthetic) {
    if (a.n < 16) throw ConfigError("n must be at least 16");
    sample = density.sample(a.n, a.seed);
  } else {
    if (method == Method::DantzigNonAdaptive)
      throw ConfigError("the non-adaptive method needs a synthetic density with known sup-norm");
    sample = config_guard([&] { return make_sample(read_data_file(a.data)); });
  }
  const Dictionary dict = config_guard([&] { return Dictionary::build(kind, sample.size()); });
  if (method == Method::SoftThreshold && !dict.is_orthonormal())
    throw ConfigError("soft thresholding needs an orthonormal dictionary");
  if (common.verbose) err << "estimate: " << to_string(kind) << " dictionary with M = " << dict.size() << '\n';

  const GramMatrix g = gram(dict);
  const SampleMoments moments = sample_moments(sample, dict);
  SolverOptions options;
  if (a.max_iter > 0) {
    options.max_iterations = a.max_iter;
    options.lasso_max_sweeps = a.max_iter;
  }
  const Estimate est = estimate(moments, dict, g, method, a.gamma, density.sup_norm(), options);

  json report = {{"header", header_json(header)},
                 {"dictionary", {{"kind", std::string(to_string(kind))}, {"n", dict.sample_size()}, {"M", dict.size()}}},
                 {"method", std::string(to_string(method))},
                 {"gamma", a.gamma},
                 {"solver", to_json(est.report)},
                 {"support_size", est.coefficients.support.size()},
                 {"l1_norm", est.coefficients.l1_norm}};
  if (synthetic) {
    report["density"] = std::string(density.name());
    report["seed"] = a.seed;
  } else {
    report["data"] = a.data;
  }
  if (est.first_stage_report) report["first_stage_solver"] = to_json(*est.first_stage_report);

  std::vector<double> xs(1024);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i) / static_cast<double>(xs.size() - 1);
  const auto curve = dict.synthesize(est.coefficients.values, xs);
  std::vector<double> truth;
  if (synthetic) {
    const Eigen::VectorXd beta0 = cached_true_coefficients(density, dict);
    report["risk"] = l2_risk(g, beta0, density.l2_norm_sq(), est.coefficients.values);
    if (est.first_stage) report["first_stage_risk"] = l2_risk(g, beta0, density.l2_norm_sq(), est.first_stage->values);
    for (double x : xs) truth.push_back(density.pdf(x));
  }

  json coefficients = {{"header", header_json(header)}, {"coefficients", to_json(est.coefficients)}};
  if (est.first_stage) coefficients["first_stage"] = to_json(*est.first_stage);
  write_json(common, "estimate_coefficients.json", coefficients);
  write_json(common, "estimate_report.json", report);
  write_json(common, "estimate_stats.json", {{"header", header_json(header)}, {"stats", to_json(est.stats)}});
  {
    auto file = open_output(common, "estimate_curve.csv");
    write_curve_csv(file, header, xs, curve, truth);
  }

  out << "method " << to_string(method) << ", dictionary " << to_string(kind) << " (M = " << dict.size() << ")\n";
  out << "support " << est.coefficients.support.size() << ", l1 norm " << format_double(est.coefficients.l1_norm)
      << ", status " << to_string(est.report.status) << '\n';
  if (synthetic) {
    out << "risk " << format_double(report["risk"].get<double>()) << '\n';
    if (est.first_stage) out << "first-stage risk " << format_double(report["first_stage_risk"].get<double>()) << '\n';
  }
  return kExitOk;
}

int cmd_calibrate(const Common& common, const CalibrateArgs& a, std::ostream& out, std::ostream& err) {
  CalibrationConfig config;
  config.gammas = a.gammas;
  config.js = a.js;
  config.replications = a.reps;
  config.seed = a.seed;
  config.threads = common.threads;
  config.validate();
  const OutputHeader header{
      "calibrate",
      Canonical("calibrate").add("gammas", a.gammas).add("js", a.js).add("reps", a.reps).add("seed", a.seed).digest()};
  if (common.verbose) err << "calibrate: " << a.gammas.size() << " gammas x " << a.js.size() << " sample sizes\n";

  const CalibrationResult result = calibration_sweep(config);
  {
    auto file = open_output(common, "calibration.csv");
    write_calibration_csv(file, header, result);
  }
  json minima = json::array();
  out << "J      n  gamma_min  mean_risk\n";
  for (auto [j, g] : result.gamma_min) {
    double risk = 0.0;
    for (const auto& row : result.rows)
      if (row.j == j && row.gamma == g) risk = row.mean_risk;
    minima.push_back({{"J", j}, {"n", std::size_t{1} << j}, {"gamma_min", g}, {"mean_risk", risk}});
    char line[96];
    std::snprintf(line, sizeof line, "%-2d %6zu  %9.3g  %.6g\n", j, std::size_t{1} << j, g, risk);
    out << line;
  }
  write_json(common, "calibration_summary.json", {{"header", header_json(header)}, {"gamma_min", minima}});
  return kExitOk;
}

int cmd_benchmark(const Common& common, const BenchmarkArgs& a, std::ostream& out, std::ostream& err) {
  check_positive_gamma(a.gamma);
  BenchmarkConfig config;
  config.densities.clear();
  config.dictionaries.clear();
  for (const auto& d : a.densities) config.densities.push_back(config_guard([&] { return parse_density(d); }));
  for (const auto& d : a.dicts) config.dictionaries.push_back(config_guard([&] { return parse_dictionary_kind(d); }));
  config.n = a.n;
  config.gamma = a.gamma;
  config.replications = a.reps;
  config.seed = a.seed;
  config.threads = common.threads;
  config.validate();
  const OutputHeader header{"benchmark", Canonical("benchmark")
                                             .add("densities", a.densities)
                                             .add("dicts", a.dicts)
                                             .add("n", a.n)
                                             .add("gamma", a.gamma)
                                             .add("reps", a.reps)
                                             .add("seed", a.seed)
                                             .digest()};
  if (common.verbose)
    err << "benchmark: " << config.densities.size() << " densities x " << config.dictionaries.size()
        << " dictionaries, " << a.reps << " replications\n";

  const BenchmarkResult result = run_benchmark(config);
  for (const auto& panel : benchmark_panels()) {
    auto file = open_output(common, "benchmark_" + panel.name + ".csv");
    write_benchmark_panel_csv(file, header, result, panel);
  }
  {
    auto file = open_output(common, "benchmark_summary.csv");
    write_benchmark_summary_csv(file, header, result);
  }

  out << "density dictionary   dantzig      lasso  dantzig-na  dantzig-ls   failures\n";
  for (DensityId d : config.densities) {
    for (DictionaryKind k : config.dictionaries) {
      std::size_t failures = 0;
      char line[128];
      std::snprintf(line, sizeof line, "%-7s %-10s", std::string(to_string(d)).c_str(),
                    std::string(to_string(k)).c_str());
      out << line;
      for (Method m : kBenchmarkMethods) {
        const auto& cell = result.cell(d, k, m);
        failures += cell.failures;
        std::snprintf(line, sizeof line, " %10.4g", cell.risk.mean);
        out << line;
      }
      out << "  " << std::setw(9) << failures << '\n';
    }
  }
  return kExitOk;
}

int cmd_analyze(const Common& common, const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  GramMatrix g;
  std::string source;
  if (a.dict.size() > 5 && a.dict.ends_with(".json")) {
    std::ifstream in(a.dict);
    if (!in) throw ConfigError("cannot read Gram matrix file '" + a.dict + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError("invalid JSON in '" + a.dict + "': " + e.what());
    }
    g = gram_from_json(j);
    source = a.dict;
  } else {
    const DictionaryKind kind = config_guard([&] { return parse_dictionary_kind(a.dict); });
    const Dictionary dict = config_guard([&] { return Dictionary::build(kind, a.n); });
    g = gram(dict);
    source = std::string(to_string(kind)) + ":" + std::to_string(a.n);
  }
  const std::size_t l = a.l == 0 ? a.s : a.l;
  const OutputHeader header{"analyze", Canonical("analyze")
                                           .add("source", source)
                                           .add("s", a.s)
                                           .add("l", l)
                                           .add("l_max", a.l_max)
                                           .add("budget", a.budget)
                                           .digest()};
  if (common.verbose) err << "analyze: M = " << g.size() << '\n';

  const AssumptionCheck check = config_guard([&] { return check_assumptions(g, a.s, l, a.budget); });
  json doc = {{"header", header_json(header)}, {"source", source}, {"M", g.size()}, {"check", to_json(check)}};
  std::vector<AssumptionCheck> rows{check};
  if (a.l_max > 0) {
    const StructuralReport rep = config_guard([&] { return structural_report(g, a.l_max, a.budget); });
    doc["report"] = to_json(rep);
    rows = rep.checks;
  }
  write_json(common, "analysis.json", doc);

  out << "s  l  A1     A2     kappa1       mu1          kappa2       mu2\n";
  for (const auto& c : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%-2zu %-2zu %-6s %-6s %-12.6g %-12.6g %-12.6g %-12.6g\n", c.s, c.l,
                  c.assumption1 ? "true" : "false", c.assumption2 ? "true" : "false", c.kappa1, c.mu1, c.kappa2,
                  c.mu2);
    out << line;
  }
  return kExitOk;
}

int cmd_gram(const Common& common, const GramArgs& a, std::ostream& out, std::ostream&) {
  const DictionaryKind kind = config_guard([&] { return parse_dictionary_kind(a.dict); });
  const Dictionary dict = config_guard([&] { return Dictionary::build(kind, a.n); });
  const GramSummary s = summarize(gram(dict));
  const OutputHeader header{
      "gram", Canonical("gram").add("dict", std::string(to_string(kind))).add("n", a.n).digest()};
  write_json(common, "gram_summary.json",
             {{"header", header_json(header)},
              {"dictionary", {{"kind", std::string(to_string(kind))}, {"n", a.n}, {"M", dict.size()}}},
              {"summary", to_json(s)}});
  out << "dictionary " << to_string(kind) << ", n = " << a.n << ", M = " << dict.size() << '\n';
  out << "min eigenvalue      " << format_double(s.min_eigenvalue) << '\n';
  out << "max eigenvalue      " << format_double(s.max_eigenvalue) << '\n';
  out << "max off-diagonal    " << format_double(s.max_off_diagonal) << '\n';
  out << "identity deviation  " << format_double(s.identity_deviation) << '\n';
  out << "symmetry deviation  " << format_double(s.symmetry_deviation) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse density estimation with Dantzig and Lasso estimators over dictionaries on [0, 1]",
               "sparsedens"};
  app.set_version_flag("--version", std::string(version()));
  app.set_config("--config", "", "INI file with option values; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--out-dir", common.out_dir, "Directory for output files")
      ->envname("SPARSEDENS_OUT_DIR")
      ->capture_default_str();
  app.add_option("--cache-dir", common.cache_dir, "Directory for persisted Gram matrices");
  app.add_option("--threads", common.threads, "Worker threads for replications")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();
  app.add_flag("-v,--verbose", common.verbose, "Progress messages on stderr");

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Estimate a density from a synthetic or given sample");
  c_est->add_option("--density", est.density, "uniform, f1, f2, f3 or f4")->capture_default_str();
  c_est->add_option("--data", est.data, "File of observations in [0, 1] (replaces --density)");
  c_est->add_option("--dict", est.dict, "fou, hist, haar, wav, mix or mix2")->capture_default_str();
  c_est->add_option("--n", est.n, "Sample size")->capture_default_str();
  c_est->add_option("--gamma", est.gamma, "Threshold constant")->capture_default_str();
  c_est->add_option("--method", est.method, "dantzig, lasso, dantzig-na, dantzig-ls or soft-threshold")
      ->capture_default_str();
  c_est->add_option("--seed", est.seed, "Sampling seed")->capture_default_str();
  c_est->add_option("--max-iter", est.max_iter, "Iteration cap of the solver (simplex pivots or Lasso sweeps)")
      ->check(CLI::PositiveNumber);

  CalibrateArgs cal;
  auto* c_cal = app.add_subcommand("calibrate", "Risk of soft thresholding against gamma (uniform density, Haar)");
  c_cal->add_option("--gammas", cal.gammas, "Gamma grid")->delimiter(',');
  c_cal->add_option("--js", cal.js, "Sample sizes as exponents, n = 2^J")->delimiter(',');
  c_cal->add_option("--reps", cal.reps, "Replications per sample size")->capture_default_str();
  c_cal->add_option("--seed", cal.seed, "Base seed")->capture_default_str();

  BenchmarkArgs ben;
  auto* c_ben = app.add_subcommand("benchmark", "Method comparison over densities and dictionaries");
  c_ben->add_option("--densities", ben.densities, "Densities")->delimiter(',');
  c_ben->add_option("--dicts", ben.dicts, "Dictionaries")->delimiter(',');
  c_ben->add_option("--n", ben.n, "Sample size")->capture_default_str();
  c_ben->add_option("--gamma", ben.gamma, "Threshold constant")->capture_default_str();
  c_ben->add_option("--reps", ben.reps, "Replications")->capture_default_str();
  c_ben->add_option("--seed", ben.seed, "Base seed")->capture_default_str();

  AnalyzeArgs ana;
  auto* c_ana = app.add_subcommand("analyze", "Restricted eigenvalues, correlations and assumption checks");
  c_ana->add_option("--dict", ana.dict, "Dictionary kind, or a JSON file holding a Gram matrix")
      ->capture_default_str();
  c_ana->add_option("--n", ana.n, "Sample size used to size a built dictionary")->capture_default_str();
  c_ana->add_option("--s", ana.s, "Sparsity s")->capture_default_str();
  c_ana->add_option("--l", ana.l, "Second size l (defaults to s)");
  c_ana->add_option("--l-max", ana.l_max, "Also tabulate every (s, l) with s + l <= l-max");
  c_ana->add_option("--budget", ana.budget, "Largest number of subsets to enumerate")->capture_default_str();

  GramArgs gra;
  auto* c_gram = app.add_subcommand("gram", "Summary of a dictionary's Gram matrix");
  c_gram->add_option("--dict", gra.dict, "Dictionary kind")->capture_default_str();
  c_gram->add_option("--n", gra.n, "Sample size")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (!common.cache_dir.empty()) GramCache::global().set_directory(common.cache_dir);
    if (c_est->parsed()) return cmd_estimate(common, est, out, err);
    if (c_cal->parsed()) return cmd_calibrate(common, cal, out, err);
    if (c_ben->parsed()) return cmd_benchmark(common, ben, out, err);
    if (c_ana->parsed()) return cmd_analyze(common, ana, out, err);
    if (c_gram->parsed()) return cmd_gram(common, gra, out, err);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const QuadratureError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitConfig;
}

}  // namespace sparsedens
