#pragma once

#include <functional>
#include <span>
#include <vector>

namespace covshift {

struct QuadratureResult
{
  double value = 0.0;
  double error_estimate = 0.0;
};

// Adaptive Gauss-Kronrod (21-point) on [a, b], absolute tolerance `abs_tol`.
QuadratureResult integrate(const std::function<double(double)>& f,
                           double a,
                           double b,
                           double abs_tol = 1e-10);

// Integrates piece by piece between consecutive breakpoints (sorted and
// deduplicated internally, clipped to [a, b]). Tolerance is split evenly.
QuadratureResult integrate_piecewise(const std::function<double(double)>& f,
                                     double a,
                                     double b,
                                     std::span<const double> breakpoints,
                                     double abs_tol = 1e-10);

// Sorted, deduplicated copy of `points` restricted to [lo, hi], with both
// ends included.
std::vector<double> clip_breakpoints(std::span<const double> points, double lo, double hi);

} // namespace covshift
