#include "covshift/functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "covshift/lowerbound.hpp"

namespace covshift {

void HolderParams::validate() const
{
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::domain_error("Hoelder exponent beta must lie in (0, 1]");
  if (!(L > 0.0))
    throw std::domain_error("Hoelder constant L must be positive");
}

RegressionFunction builtin_function(const std::string& spec, const HolderParams& holder)
{
  holder.validate();
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const bool has_arg = colon != std::string::npos;
  double arg = 0.0;
  if (has_arg) {
    try {
      arg = std::stod(spec.substr(colon + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad parameter in function spec '" + spec + "'");
    }
  }

  if (name == "zero")
    return {"zero", [](double) { return 0.0; }, 0.0, {}};
  if (name == "constant") {
    const double c = has_arg ? arg : 1.0;
    return {"constant", [c](double) { return c; }, std::abs(c), {}};
  }
  if (name == "linear") {
    const double L = holder.L;
    const double beta = holder.beta;
    return {"linear", [L, beta](double x) { return L * std::pow(std::max(x, 0.0), beta); }, L, {}};
  }
  if (name == "ramp")
    return lowerbound::two_point_function(has_arg ? arg : 0.5, holder);
  if (name == "sine") {
    if (holder.beta != 1.0)
      throw std::invalid_argument("sine is only offered for beta = 1");
    const double amp = holder.L / (2.0 * std::numbers::pi);
    return {"sine", [amp](double x) { return amp * std::sin(2.0 * std::numbers::pi * x); }, amp, {}};
  }
  throw std::invalid_argument("unknown function '" + spec + "'");
}

std::vector<std::string> builtin_function_names()
{
  return {"zero", "constant", "linear", "ramp", "sine"};
}

} // namespace covshift
