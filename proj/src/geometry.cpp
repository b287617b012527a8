#include "covshift/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace covshift::geometry {

MetricSpace::MetricSpace(SpaceKind kind, std::size_t dim, double diameter)
  : kind_(kind), dim_(dim), diameter_(diameter)
{
}

MetricSpace MetricSpace::unit_interval()
{
  return MetricSpace(SpaceKind::unit_interval, 1, 1.0);
}

MetricSpace MetricSpace::unit_cube(std::size_t dim, double diameter)
{
  if (dim == 0)
    throw std::domain_error("unit_cube: dim must be positive");
  if (!(diameter > 0.0))
    throw std::domain_error("unit_cube: diameter must be positive");
  return MetricSpace(SpaceKind::unit_cube, dim, diameter);
}

std::size_t covering_number_interval(double h)
{
  if (!(h > 0.0) || std::isnan(h))
    throw std::domain_error("covering_number_interval: h must be positive");
  if (h >= 0.5)
    return 1;
  // ceil(1/(2h)) with a guard against 1/(2h) landing one ulp above an integer.
  const double q = 1.0 / (2.0 * h);
  auto n = static_cast<std::size_t>(std::ceil(q));
  if (n > 1 && static_cast<double>(n - 1) * 2.0 * h >= 1.0)
    --n;
  if (static_cast<double>(n) * 2.0 * h < 1.0)
    ++n;
  return n;
}

CoverBound covering_bound_cube(std::size_t dim, double diameter, double h)
{
  if (dim == 0)
    throw std::domain_error("covering_bound_cube: dim must be positive");
  if (!(diameter > 0.0))
    throw std::domain_error("covering_bound_cube: diameter must be positive");
  if (!(h > 0.0))
    throw std::domain_error("covering_bound_cube: h must be positive");
  const double base = 1.0 + 2.0 * diameter / h;
  const double log_value = static_cast<double>(dim) * std::log(base);
  if (!std::isfinite(base) || log_value >= std::log(std::numeric_limits<double>::max()))
    return {std::numeric_limits<double>::max(), true};
  return {std::pow(base, static_cast<double>(dim)), false};
}

} // namespace covshift::geometry
