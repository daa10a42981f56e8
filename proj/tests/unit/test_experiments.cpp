#include "sparsedens/errors.hpp"
#include "sparsedens/experiments.hpp"
#include "sparsedens/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sparsedens;

namespace {

std::vector<double> cuts_for(const TrueDensity& f, const Dictionary& d, std::size_t m) {
  auto cuts = d.breakpoints(m);
  cuts.insert(cuts.end(), f.breakpoints().begin(), f.breakpoints().end());
  return cuts;
}

double chunk_for(const Dictionary& d, std::size_t m) {
  const auto& mem = d.member(m);
  return mem.family == Family::Cosine || mem.family == Family::Sine ? 1.0 / mem.level : 1.0 / 16.0;
}

}  // namespace

TEST_CASE("true coefficients of the uniform density on Haar") {
  const auto d = Dictionary::build(DictionaryKind::Haar, 128);
  const auto b = true_coefficients(TrueDensity::make(DensityId::Uniform), d);
  CHECK(b[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b.tail(b.size() - 1).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("true coefficients agree with direct quadrature") {
  for (auto kind : {DictionaryKind::Mix2, DictionaryKind::Daubechies}) {
    const auto d = Dictionary::build(kind, 64);
    for (auto id : {DensityId::F1, DensityId::F2, DensityId::F3, DensityId::F4}) {
      const auto f = TrueDensity::make(id);
      const auto b = true_coefficients(f, d);
      for (std::size_t m = 0; m < d.size(); m += 3) {
        CAPTURE(d.member_name(m));
        CAPTURE(f.name());
        // the tabulated wavelet has a kink every 2^-16, too many for a 1e-12 target
        const double tol = d.member(m).family == Family::DaubechiesWavelet ? 1e-10 : 1e-12;
        const double ref = integrate_piecewise([&](double x) { return d.evaluate(m, x) * f.pdf(x); }, 0.0, 1.0,
                                               cuts_for(f, d, m), tol, chunk_for(d, m));
        CHECK(std::abs(b[static_cast<Eigen::Index>(m)] - ref) <= 1e-8);
      }
    }
  }
  // f3 against histogram bins is a difference of its distribution function
  const auto h = Dictionary::build(DictionaryKind::Histogram, 64);
  const auto bh = true_coefficients(TrueDensity::make(DensityId::F3), h);
  REQUIRE(h.size() == 4);
  CHECK(bh[1] == doctest::Approx(2.0 * 0.25).epsilon(1e-12));
  CHECK(bh[2] == doctest::Approx(2.0 * 0.75 * (0.75 - 0.64) / 0.16).epsilon(1e-12));
  CHECK(bh[0] == 0.0);
  CHECK(cached_true_coefficients(TrueDensity::make(DensityId::F3), h) == bh);
}

TEST_CASE("risk identity against quadrature") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal;
  const auto d = Dictionary::build(DictionaryKind::Mix, 32);
  const auto g = compute_gram(d);
  for (auto id : {DensityId::F2, DensityId::F3, DensityId::F4}) {
    const auto f = TrueDensity::make(id);
    const auto b0 = true_coefficients(f, d);
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(b0.size());
    CHECK(l2_risk(g, b0, f.l2_norm_sq(), zero) == doctest::Approx(f.l2_norm_sq()));
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd lambda = zero;
      std::vector<double> cuts = f.breakpoints();
      for (int k = 0; k < 4; ++k) {
        const auto m = static_cast<std::size_t>(rng() % d.size());
        lambda[static_cast<Eigen::Index>(m)] = normal(rng);
        const auto bm = d.breakpoints(m);
        cuts.insert(cuts.end(), bm.begin(), bm.end());
      }
      const double ref = integrate_piecewise(
          [&](double x) {
            const double v = d.synthesize(lambda, std::span<const double>(&x, 1))[0] - f.pdf(x);
            return v * v;
          },
          0.0, 1.0, cuts, 1e-11, 1.0 / 16.0);
      CHECK(l2_risk(f, d, lambda) == doctest::Approx(ref).epsilon(1e-7));
    }
  }
  const auto haar = Dictionary::build(DictionaryKind::Haar, 64);
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(32);
  e0[0] = 1.0;
  CHECK(std::abs(l2_risk(TrueDensity::make(DensityId::Uniform), haar, e0)) < 1e-14);
}

TEST_CASE("estimators coincide with soft thresholding on an orthonormal dictionary") {
  const auto d = Dictionary::build(DictionaryKind::Haar, 256);
  const auto g = GramMatrix::identity(static_cast<Eigen::Index>(d.size()));
  const auto mom = sample_moments(TrueDensity::make(DensityId::F3).sample(256, 5), d);
  const auto soft = estimate(mom, d, g, Method::SoftThreshold, 1.01);
  for (auto method : {Method::Dantzig, Method::Lasso}) {
    const auto e = estimate(mom, d, g, method, 1.01);
    CHECK((e.coefficients.values - soft.coefficients.values).lpNorm<Eigen::Infinity>() < 1e-9);
  }
  const auto ls = estimate(mom, d, g, Method::DantzigLS, 1.01);
  REQUIRE(ls.first_stage);
  CHECK(ls.coefficients.support == ls.first_stage->support);
  for (auto m : ls.coefficients.support)
    CHECK(ls.coefficients.values[static_cast<Eigen::Index>(m)] ==
          doctest::Approx(mom.beta_hat[static_cast<Eigen::Index>(m)]).epsilon(1e-12));
}

TEST_CASE("refit keeps the Dantzig support on a redundant dictionary") {
  const auto d = Dictionary::build(DictionaryKind::Mix, 128);
  const auto g = compute_gram(d);
  const auto mom = sample_moments(TrueDensity::make(DensityId::F4).sample(128, 8), d);
  const auto ls = estimate(mom, d, g, Method::DantzigLS, 1.01);
  const auto dz = estimate(mom, d, g, Method::Dantzig, 1.01);
  REQUIRE(ls.first_stage);
  CHECK(ls.first_stage->support == dz.coefficients.support);
  CHECK(ls.coefficients.support.size() <= dz.coefficients.support.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    if (std::find(dz.coefficients.support.begin(), dz.coefficients.support.end(), i) == dz.coefficients.support.end())
      CHECK(ls.coefficients.values[static_cast<Eigen::Index>(i)] == 0.0);
}

TEST_CASE("replications are deterministic and thread invariant") {
  ExperimentConfig c;
  c.density = DensityId::F2;
  c.dictionary = DictionaryKind::Mix;
  c.n = 128;
  c.replications = 6;
  c.seed = 44;
  const auto a = run_experiment(c);
  c.threads = 3;
  const auto b = run_experiment(c);
  REQUIRE(a.records.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(a.records[i].seed == derive_seed(44, i));
    CHECK(a.records[i].risk == b.records[i].risk);
    CHECK(a.records[i].support_size == b.records[i].support_size);
  }
  CHECK(a.risk.mean == b.risk.mean);
}

TEST_CASE("a uniform sample on Haar is estimated well") {
  ExperimentConfig c;
  c.n = 500;
  const auto r = run_experiment(c);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].ok);
  CHECK(r.records[0].risk <= 0.1);
  CHECK(r.failures == 0);
}

TEST_CASE("configuration validation") {
  ExperimentConfig c;
  c.n = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.gamma = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.replications = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  auto cal = CalibrationConfig::defaults();
  CHECK(cal.gammas.size() == 15);
  CHECK(cal.js.front() == 4);
  CHECK(cal.js.back() == 10);
  cal.gammas.clear();
  CHECK_THROWS_AS(cal.validate(), ConfigError);
}

TEST_CASE("boxplot statistics") {
  const auto s = boxplot_stats({100.0, 3.0, 1.0, 4.0, 2.0});
  CHECK(s.count == 5);
  CHECK(s.mean == doctest::Approx(22.0));
  CHECK(s.min == 1.0);
  CHECK(s.q1 == 2.0);
  CHECK(s.median == 3.0);
  CHECK(s.q3 == 4.0);
  CHECK(s.max == 100.0);
  CHECK(s.whisker_low == 1.0);
  CHECK(s.whisker_high == 4.0);
  const auto t = boxplot_stats({1.0, 2.0, 3.0, 4.0});
  CHECK(t.q1 == doctest::Approx(1.75));
  CHECK(t.median == doctest::Approx(2.5));
  CHECK(t.q3 == doctest::Approx(3.25));
  CHECK(boxplot_stats({}).count == 0);
}

TEST_CASE("a small calibration sweep") {
  CalibrationConfig c;
  c.gammas = {0.2, 1.0};
  c.js = {4, 5};
  c.replications = 3;
  const auto r = calibration_sweep(c);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.rows[0].j == 4);
  CHECK(r.rows[0].gamma == 0.2);
  CHECK(r.rows[3].n == 32);
  for (const auto& row : r.rows) CHECK(row.log2_mean_risk == doctest::Approx(std::log2(row.mean_risk)));
  REQUIRE(r.gamma_min.size() == 2);
  for (auto [j, g] : r.gamma_min) CHECK((g == 0.2 || g == 1.0));
}

TEST_CASE("a small benchmark") {
  BenchmarkConfig c;
  c.densities = {DensityId::F3};
  c.dictionaries = {DictionaryKind::Haar, DictionaryKind::Mix};
  c.n = 128;
  c.replications = 2;
  const auto r = run_benchmark(c);
  CHECK(r.cells.size() == 2 * 4);
  const auto& dz = r.cell(DensityId::F3, DictionaryKind::Haar, Method::Dantzig);
  const auto& la = r.cell(DensityId::F3, DictionaryKind::Haar, Method::Lasso);
  for (std::size_t i = 0; i < 2; ++i) CHECK(dz.records[i].risk == doctest::Approx(la.records[i].risk).epsilon(1e-9));
  CHECK(benchmark_panels().size() == 3);
  CHECK_THROWS(r.cell(DensityId::F1, DictionaryKind::Haar, Method::Dantzig));
}
