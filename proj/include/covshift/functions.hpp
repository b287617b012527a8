#pragma once

#include <functional>
#include <string>
#include <vector>

namespace covshift {

// Hoelder class parameters: |f(x) - f(x')| <= L |x - x'|^beta.
struct HolderParams
{
  double beta = 1.0;
  double L = 1.0;

  void validate() const;
};

// A regression function on [0, 1] together with what the bounds and the
// quadrature need to know about it.
struct RegressionFunction
{
  std::string name;
  std::function<double(double)> eval;
  double sup_norm = 0.0;     // sup over [0, 1] of |f|
  std::vector<double> kinks; // points where f is not smooth

  double operator()(double x) const { return eval(x); }
};

/// Builtins, parameterized by the Hoelder class where relevant:
///   zero        f = 0
///   constant[:c] f = c (default 1)
///   linear      f(x) = L x^beta
///   ramp[:t]    f(x) = L (x - t)_+^beta (default t = 0.5)
///   sine        f(x) = L / (2 pi) sin(2 pi x)   (Lipschitz, beta = 1)
/// Throws std::invalid_argument for unknown names.
RegressionFunction builtin_function(const std::string& spec, const HolderParams& holder);

std::vector<std::string> builtin_function_names();

} // namespace covshift
