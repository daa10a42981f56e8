#include "sparsedens/errors.hpp"
#include "sparsedens/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace sparsedens;

TEST_CASE("polynomials and smooth functions") {
  CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(integrate([](double x) { return std::exp(x); }, -1.0, 2.0) ==
        doctest::Approx(std::exp(2.0) - std::exp(-1.0)).epsilon(1e-13));
  CHECK(integrate([](double) { return 1.0; }, 0.3, 0.3) == 0.0);
}

TEST_CASE("error estimate scales with the interval") {
  // an oscillation the 31-point rule cannot resolve on the whole interval
  const double k = 2.0 * std::numbers::pi * 250.0;
  const double v = integrate([&](double x) { return std::sin(k * x) * x; }, 0.0, 1.0, 1e-11);
  CHECK(v == doctest::Approx(-1.0 / 500.0 / std::numbers::pi).epsilon(1e-9));
  const double tiny = integrate([&](double x) { return std::cos(k * x); }, 0.0, 1e-3, 1e-12);
  CHECK(tiny == doctest::Approx(std::sin(k * 1e-3) / k).epsilon(1e-9));
}

TEST_CASE("piecewise integration handles jumps at breakpoints") {
  auto step = [](double x) { return x < 0.37 ? 2.0 : (x < 0.81 ? -1.0 : 0.5); };
  const std::vector<double> cuts{0.37, 0.81, 5.0};
  CHECK(integrate_piecewise(step, 0.0, 1.0, cuts, 1e-12) ==
        doctest::Approx(2.0 * 0.37 - 0.44 + 0.5 * 0.19).epsilon(1e-13));
}

TEST_CASE("piecewise integration with chunking agrees with a composite Simpson rule") {
  auto f = [](double x) { return std::sqrt(2.0) * std::cos(2.0 * std::numbers::pi * 40.0 * x) * (1.0 + x * x); };
  const double v = integrate_piecewise(f, 0.0, 1.0, {}, 1e-12, 1.0 / 40.0);
  const int n = 200000;
  const double h = 1.0 / n;
  double s = f(0.0) + f(1.0);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  CHECK(v == doctest::Approx(s * h / 3.0).epsilon(1e-9));
}

TEST_CASE("failure to converge is reported") {
  auto nasty = [](double x) { return x > 0.0 ? std::sin(1.0 / x) / x : 0.0; };
  CHECK_THROWS_AS(integrate(nasty, 0.0, 1.0, 1e-14, 6), QuadratureError);
}
