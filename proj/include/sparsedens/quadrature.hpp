#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sparsedens {

/// Adaptive Gauss-Kronrod integration of f over [a, b] to an absolute
/// tolerance. Throws QuadratureError when the tolerance is not met within the
/// subdivision depth limit.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-11, int max_depth = 30);

/// Integrates over [a, b] split at the given breakpoints (those outside the
/// interval are ignored) and additionally into chunks no longer than
/// max_chunk. The tolerance is shared across pieces.
double integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints, double abs_tol = 1e-11,
                           double max_chunk = 1.0);

}  // namespace sparsedens
