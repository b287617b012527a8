#pragma once

#include <cstddef>

namespace covshift::geometry {

enum class SpaceKind
{
  unit_interval,
  unit_cube,
};

// [0,1] or [0,1]^dim under the norm the diameter refers to.
class MetricSpace
{
public:
  static MetricSpace unit_interval();
  static MetricSpace unit_cube(std::size_t dim, double diameter);

  SpaceKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  double diameter() const { return diameter_; }

private:
  MetricSpace(SpaceKind kind, std::size_t dim, double diameter);

  SpaceKind kind_;
  std::size_t dim_;
  double diameter_;
};

/// Minimal number of closed radius-h intervals covering [0,1]: ceil(1/(2h)).
/// Centers h, 3h, 5h, ... realize it. Throws std::domain_error for h <= 0.
std::size_t covering_number_interval(double h);

struct CoverBound
{
  double value = 0.0;
  bool saturated = false; // true when (1 + 2D/h)^dim overflowed a double
};

/// Upper bound (1 + 2 D / h)^dim on the radius-h covering number of a set
/// of diameter D in dim dimensions.
CoverBound covering_bound_cube(std::size_t dim, double diameter, double h);

} // namespace covshift::geometry
