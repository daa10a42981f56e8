#include "sparsedens/errors.hpp"
#include "sparsedens/solvers.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace sparsedens;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

DantzigProblem problem(MatrixXd g, VectorXd beta, VectorXd eta) {
  return DantzigProblem{GramMatrix(std::move(g)), std::move(beta), std::move(eta)};
}

DantzigProblem random_problem(std::mt19937_64& rng, int m, int rows, double eta_lo, double eta_hi) {
  auto inst = oracle::random_instance(rng, m, rows, 0.5);
  return problem(std::move(inst.gram), std::move(inst.beta), oracle::random_positive(rng, m, eta_lo, eta_hi));
}

}  // namespace

TEST_CASE("dantzig on the identity is a soft threshold") {
  auto p = problem(MatrixXd::Identity(2, 2), VectorXd{{0.5, -0.2}}, VectorXd{{0.1, 0.3}});
  const auto r = dantzig_solve(p);
  CHECK(r.report.status == SolverStatus::Optimal);
  CHECK(r.coefficients.values[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(r.coefficients.values[1] == 0.0);
  CHECK(r.coefficients.l1_norm == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(r.coefficients.support == std::vector<std::size_t>{0});
}

TEST_CASE("dantzig returns zero when zero is feasible") {
  std::mt19937_64 rng(3);
  auto p = random_problem(rng, 5, 8, 0.3, 0.4);
  p.beta_hat = p.beta_hat.cwiseMax(-0.25).cwiseMin(0.25);
  const auto r = dantzig_solve(p);
  CHECK(r.report.status == SolverStatus::Optimal);
  CHECK(r.coefficients.values.isZero(0.0));
  CHECK(r.coefficients.support.empty());
}

TEST_CASE("dantzig matches the vertex enumeration oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 2 + trial % 5;
    const auto p = random_problem(rng, m, m + trial % 3, 0.02, 0.2);
    const auto ref = oracle::dantzig_by_vertices(p.gram.matrix(), p.beta_hat, p.eta);
    REQUIRE(ref.feasible);
    const auto r = dantzig_solve(p);
    CAPTURE(trial);
    REQUIRE(r.report.status == SolverStatus::Optimal);
    CHECK(std::abs(r.coefficients.l1_norm - ref.objective) <= 1e-7);
    CHECK(dantzig_violation(p, r.coefficients.values) <= 1e-8);
  }
}

TEST_CASE("dantzig with unit-diagonal 5x5 PSD gram and constant eta") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = random_problem(rng, 5, 7, 0.05, 0.05);
    p.eta.setConstant(0.05);
    const auto ref = oracle::dantzig_by_vertices(p.gram.matrix(), p.beta_hat, p.eta);
    const auto r = dantzig_solve(p);
    CHECK(std::abs(r.report.objective - ref.objective) <= 1e-7);
  }
}

TEST_CASE("dantzig emits a dual certificate") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_problem(rng, 12, 15, 0.01, 0.1);
    const auto r = dantzig_solve(p);
    REQUIRE(r.report.status == SolverStatus::Optimal);
    const VectorXd& u = r.dual;
    REQUIRE(u.size() == 12);
    CHECK((p.gram.matrix() * u).lpNorm<Eigen::Infinity>() <= 1.0 + 1e-9);
    const double dual_obj = p.beta_hat.dot(u) - p.eta.dot(u.cwiseAbs());
    CHECK(std::abs(dual_obj - r.coefficients.l1_norm) <= 1e-8);
    CHECK(std::abs(r.report.duality_gap_or_kkt_residual) <= 1e-8);
  }
}

TEST_CASE("dantzig objective is equivariant under scaling of beta and eta") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_problem(rng, 8, 10, 0.02, 0.2);
    const double c = 0.1 + 5.0 * std::uniform_real_distribution<double>()(rng);
    auto scaled = p;
    scaled.beta_hat *= c;
    scaled.eta *= c;
    const auto a = dantzig_solve(p);
    const auto b = dantzig_solve(scaled);
    CHECK(b.report.objective == doctest::Approx(c * a.report.objective).epsilon(1e-9));
  }
}

TEST_CASE("bland-only pivoting reaches the same optimum") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_problem(rng, 10, 12, 0.02, 0.2);
    SolverOptions opts;
    opts.bland_only = true;
    const auto a = dantzig_solve(p);
    const auto b = dantzig_solve(p, opts);
    REQUIRE(b.report.status == SolverStatus::Optimal);
    CHECK(std::abs(a.report.objective - b.report.objective) <= 1e-9);
  }
}

TEST_CASE("dantzig handles a redundant gram with duplicated columns") {
  std::mt19937_64 rng(31);
  MatrixXd base = oracle::random_gram(rng, 4, 6);
  MatrixXd g(6, 6);
  const int map[6] = {0, 1, 2, 3, 0, 2};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) g(i, j) = base(map[i], map[j]);
  VectorXd beta(6);
  const VectorXd b4 = oracle::random_vector(rng, 4, 0.5);
  for (int i = 0; i < 6; ++i) beta[i] = b4[map[i]];
  const auto p = problem(g, beta, VectorXd::Constant(6, 0.05));
  const auto ref = oracle::dantzig_by_vertices(g, beta, p.eta);
  const auto r = dantzig_solve(p);
  REQUIRE(r.report.status == SolverStatus::Optimal);
  CHECK(std::abs(r.report.objective - ref.objective) <= 1e-7);
}

TEST_CASE("dantzig reports an empty feasible set") {
  const auto p = problem(MatrixXd::Ones(2, 2), VectorXd{{1.0, -1.0}}, VectorXd{{0.1, 0.1}});
  const auto r = dantzig_solve(p);
  CHECK(r.report.status == SolverStatus::Infeasible);
}

TEST_CASE("dantzig rejects malformed problems") {
  CHECK_THROWS_AS(dantzig_solve(problem(MatrixXd::Identity(2, 2), VectorXd::Zero(3), VectorXd::Ones(2))),
                  std::invalid_argument);
  CHECK_THROWS_AS(dantzig_solve(problem(MatrixXd::Identity(2, 2), VectorXd::Zero(2), VectorXd{{1.0, 0.0}})),
                  std::invalid_argument);
}

TEST_CASE("lasso on the identity is a soft threshold") {
  const VectorXd beta{{0.7, -0.5, 0.1, 0.0}};
  const VectorXd eta{{0.2, 0.1, 0.3, 0.1}};
  const auto r = lasso_solve(problem(MatrixXd::Identity(4, 4), beta, eta));
  CHECK(r.coefficients.values[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.coefficients.values[1] == doctest::Approx(-0.4).epsilon(1e-12));
  CHECK(r.coefficients.values[2] == 0.0);
  CHECK(r.coefficients.values[3] == 0.0);
}

TEST_CASE("lasso with zero data is zero") {
  std::mt19937_64 rng(37);
  auto p = random_problem(rng, 6, 8, 0.05, 0.1);
  p.beta_hat.setZero();
  const auto r = lasso_solve(p);
  CHECK(r.coefficients.values.isZero(0.0));
}

TEST_CASE("lasso matches an accelerated proximal gradient oracle") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_problem(rng, 6, 8, 0.02, 0.2);
    const VectorXd ref = oracle::lasso_by_fista(p.gram.matrix(), p.beta_hat, p.eta);
    const auto r = lasso_solve(p);
    REQUIRE(r.report.status == SolverStatus::Optimal);
    CHECK(lasso_objective(p, r.coefficients.values) <= lasso_objective(p, ref) + 1e-8);
    CHECK(std::abs(lasso_objective(p, r.coefficients.values) - lasso_objective(p, ref)) <= 1e-8);
  }
}

TEST_CASE("lasso satisfies its first-order conditions and the Dantzig constraint") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 5 + trial;
    const auto p = random_problem(rng, m, m / 2 + 3, 0.01, 0.1);
    const auto l = lasso_solve(p);
    REQUIRE(l.report.status == SolverStatus::Optimal);
    const VectorXd grad = p.gram.matrix() * l.coefficients.values - p.beta_hat;
    for (int i = 0; i < m; ++i) {
      const double v = l.coefficients.values[i];
      if (v != 0.0)
        CHECK(std::abs(grad[i] + (v > 0 ? 1.0 : -1.0) * p.eta[i]) <= 1e-8);
      else
        CHECK(std::abs(grad[i]) <= p.eta[i] + 1e-8);
    }
    CHECK(dantzig_violation(p, l.coefficients.values) <= 1e-8);
    const auto d = dantzig_solve(p);
    REQUIRE(d.report.status == SolverStatus::Optimal);
    CHECK(d.coefficients.l1_norm <= l.coefficients.l1_norm + 1e-8);
  }
}

TEST_CASE("refit solves the restricted normal equations") {
  MatrixXd g = MatrixXd::Constant(3, 3, 0.5);
  g.diagonal().setOnes();
  const VectorXd beta{{0.3, -0.6, 0.9}};
  const std::vector<std::size_t> support{0, 1};
  const auto c = two_step_refit(GramMatrix(g), beta, support);
  // inverse of [[1, .5], [.5, 1]] is (4/3) [[1, -.5], [-.5, 1]]
  CHECK(c.values[0] == doctest::Approx(4.0 / 3.0 * (0.3 + 0.3)).epsilon(1e-12));
  CHECK(c.values[1] == doctest::Approx(4.0 / 3.0 * (-0.15 - 0.6)).epsilon(1e-12));
  CHECK(c.values[2] == 0.0);
  CHECK(c.method == Method::DantzigLS);
}

TEST_CASE("refit on the identity restricts beta") {
  const VectorXd beta{{0.3, -0.6, 0.9, 0.1}};
  const std::vector<std::size_t> support{1, 3};
  const auto c = two_step_refit(GramMatrix::identity(4), beta, support);
  CHECK(c.values == VectorXd{{0.0, -0.6, 0.0, 0.1}});
  const auto empty = two_step_refit(GramMatrix::identity(4), beta, {});
  CHECK(empty.values.isZero(0.0));
}

TEST_CASE("refit refuses singular and ill-conditioned systems") {
  const std::vector<std::size_t> both{0, 1};
  const VectorXd beta{{1.0, 1.0}};
  try {
    two_step_refit(GramMatrix(MatrixXd::Ones(2, 2)), beta, both);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(e.condition() > 1e12);
  }
  MatrixXd near{{1.0, 1.0 - 1e-14}, {1.0 - 1e-14, 1.0}};
  CHECK_THROWS_AS(two_step_refit(GramMatrix(near), beta, both), SolverError);
}

TEST_CASE("soft threshold examples") {
  const auto c = soft_threshold_estimate(VectorXd{{0.7, -0.1, -0.9, 0.2}}, VectorXd{{0.2, 0.2, 0.4, 0.2}});
  CHECK(c.values[0] == doctest::Approx(0.5));
  CHECK(c.values[1] == 0.0);
  CHECK(c.values[2] == doctest::Approx(-0.5));
  CHECK(c.values[3] == 0.0);
  CHECK(c.support == std::vector<std::size_t>{0, 2});
  CHECK(c.l1_norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coefficient vectors keep support and norm consistent") {
  const auto c = CoefficientVector::from_values(VectorXd{{1e-13, -2.0, 0.0, 5e-12}}, Method::Lasso);
  CHECK(c.values[0] == 0.0);
  CHECK(c.support == std::vector<std::size_t>{1, 3});
  CHECK(c.l1_norm == doctest::Approx(2.0 + 5e-12).epsilon(1e-15));
}

TEST_CASE("all three solvers agree on orthonormal problems") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 64;
    const auto p = problem(MatrixXd::Identity(m, m), oracle::random_vector(rng, m, 0.2),
                           oracle::random_positive(rng, m, 0.05, 0.2));
    const auto d = dantzig_solve(p);
    const auto l = lasso_solve(p);
    const auto s = soft_threshold_estimate(p.beta_hat, p.eta);
    CHECK((d.coefficients.values - s.values).lpNorm<Eigen::Infinity>() <= 1e-9);
    CHECK((l.coefficients.values - s.values).lpNorm<Eigen::Infinity>() <= 1e-9);
  }
}

TEST_CASE("method names round-trip") {
  for (auto m : {Method::Dantzig, Method::Lasso, Method::DantzigNonAdaptive, Method::DantzigLS, Method::SoftThreshold})
    CHECK(parse_method(to_string(m)) == m);
  CHECK_THROWS_AS(parse_method("simplex"), std::invalid_argument);
}
