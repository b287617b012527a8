#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "covshift/distributions.hpp"
#include "covshift/functions.hpp"

namespace covshift::experiments {

struct BandwidthRule
{
  enum class Kind
  {
    corollary2,
    fixed,
  };
  Kind kind = Kind::corollary2;
  std::optional<double> alpha; // corollary2: defaults to the pair's declared alpha
  double h = 0.1;              // fixed
};

struct RateSpec
{
  SourceTargetPair pair;
  std::string f_name = "linear";
  HolderParams holder;
  double sigma = 1.0;
  std::vector<std::pair<std::size_t, std::size_t>> n_grid; // (nP, nQ)
  BandwidthRule bandwidth;
  std::size_t trials = 50;
  std::size_t eval_points = 1000;
  std::uint64_t base_seed = 0;

  void validate() const;
};

struct RateRow
{
  std::size_t nP = 0;
  std::size_t nQ = 0;
  double h = 0.0;
  double mse_mean = 0.0;
  double mse_stderr = 0.0;
  double bound_rhs = 0.0;
  bool regime_ok = true; // sigma >= L and max(nP, nQ) >= 4 sigma^2
};

struct RateTable
{
  std::vector<RateRow> rows;
};

/// alpha used by the corollary-2 rule when the spec does not give one:
/// declared alpha for big/small, gamma for transfer pairs, 1 for
/// likelihood-ratio-bounded pairs.
double declared_alpha(const SourceTargetPair& pair);

RateTable run_rates(const RateSpec& spec, unsigned threads = 1);

enum class Axis
{
  total_n,
  n_eff,
};

enum class Window
{
  all,
  upper_half, // last ceil(rows / 2) rows
};

struct SlopeFit
{
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least squares of log(mse) on log(n) (or log n_eff(b)).
SlopeFit fit_slope(const RateTable& table, Axis axis, double b = 1.0, Window window = Window::upper_half);

/// n_eff(b) = nP / b + nQ.
double effective_sample_size(std::size_t nP, std::size_t nQ, double b);

RateSpec spec_from_json(const nlohmann::json& j);

void write_csv(const RateTable& table, std::ostream& out);

} // namespace covshift::experiments
