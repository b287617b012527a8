#include "covshift/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace covshift {

namespace {

constexpr unsigned max_depth = 15;

} // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol)
{
  if (!(b > a))
    return {};
  using rule = boost::math::quadrature::gauss_kronrod<double, 21>;
  // boost compares an unscaled error against a width-scaled tolerance, so
  // narrow pieces never converge; integrate over [0, 1] instead.
  const double w = b - a;
  auto g = [&](double u) { return f(a + w * u); };
  // boost's tolerance is relative to the L1 norm of f; tighten it once the
  // norm is known so the absolute target is met, but never below what
  // double precision can deliver.
  double err = 0.0;
  double l1 = 0.0;
  double value = rule::integrate(g, 0.0, 1.0, max_depth, 1e-10, &err, &l1);
  if (w * err > abs_tol && l1 > 0.0) {
    const double rel = std::max(abs_tol / (w * l1), 1e-13);
    if (rel < 1e-10)
      value = rule::integrate(g, 0.0, 1.0, max_depth, rel, &err, &l1);
  }
  value *= w;
  err *= w;
  return {value, err};
}

std::vector<double> clip_breakpoints(std::span<const double> points, double lo, double hi)
{
  std::vector<double> out;
  out.reserve(points.size() + 2);
  out.push_back(lo);
  out.push_back(hi);
  for (double p : points) {
    if (p > lo && p < hi)
      out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

QuadratureResult integrate_piecewise(const std::function<double(double)>& f,
                                     double a,
                                     double b,
                                     std::span<const double> breakpoints,
                                     double abs_tol)
{
  if (!(b > a))
    return {};
  const auto knots = clip_breakpoints(breakpoints, a, b);
  const double piece_tol = abs_tol / static_cast<double>(knots.size() - 1);
  QuadratureResult total;
  // Neumaier summation over pieces.
  double comp = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (!(knots[i + 1] > knots[i]))
      continue;
    const auto piece = integrate(f, knots[i], knots[i + 1], piece_tol);
    const double t = total.value + piece.value;
    if (std::abs(total.value) >= std::abs(piece.value))
      comp += (total.value - t) + piece.value;
    else
      comp += (piece.value - t) + total.value;
    total.value = t;
    total.error_estimate += piece.error_estimate;
  }
  total.value += comp;
  return total;
}

} // namespace covshift
