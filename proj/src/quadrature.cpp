#include "sparsedens/quadrature.hpp"

#include "sparsedens/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sparsedens {
namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;

double adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth, bool& ok) {
  double err = 0.0;
  double l1 = 0.0;
  const double est = Rule::integrate(f, a, b, 0, 0.0, &err, &l1);
  // Boost 1.74 reports the non-recursive error estimate on [-1, 1]; rescale it.
  err *= 0.5 * (b - a);
  // Below this the estimate is pure rounding noise and bisection cannot help.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * l1;
  if (err <= std::max(tol, floor) || depth <= 0 || b - a < 1e-15) {
    if (err > std::max(tol, floor)) ok = false;
    return est;
  }
  const double mid = 0.5 * (a + b);
  return adapt(f, a, mid, 0.5 * tol, depth - 1, ok) + adapt(f, mid, b, 0.5 * tol, depth - 1, ok);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol, int max_depth) {
  if (b <= a) return 0.0;
  bool ok = true;
  const double value = adapt(f, a, b, abs_tol, max_depth, ok);
  if (!ok) {
    std::ostringstream msg;
    msg << "quadrature on [" << a << ", " << b << "] did not reach tolerance " << abs_tol;
    throw QuadratureError(msg.str());
  }
  return value;
}

double integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints, double abs_tol, double max_chunk) {
  std::vector<double> cuts{a, b};
  for (double t : breakpoints)
    if (t > a && t < b) cuts.push_back(t);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> grid;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    const auto chunks = static_cast<std::size_t>(std::max(1.0, std::ceil(len / max_chunk)));
    for (std::size_t c = 0; c < chunks; ++c) grid.push_back(cuts[i] + len * static_cast<double>(c) / chunks);
  }
  grid.push_back(b);

  const double per_piece = abs_tol / static_cast<double>(grid.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) total += integrate(f, grid[i], grid[i + 1], per_piece);
  return total;
}

}  // namespace sparsedens
