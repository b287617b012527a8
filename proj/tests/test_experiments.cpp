#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "covshift/experiments.hpp"
#include "covshift/instance.hpp"

using namespace covshift;
using namespace covshift::experiments;
using Catch::Approx;

namespace {

RateTable synthetic(double exponent, double c)
{
  RateTable t;
  for (std::size_t n = 256; n <= 65536; n *= 2)
    t.rows.push_back(RateRow{0, n, 0.1, c * std::pow(static_cast<double>(n), exponent), 0.0, 1.0, true});
  return t;
}

} // namespace

TEST_CASE("slope of an exact power law")
{
  const auto fit = fit_slope(synthetic(-2.0 / 3.0, 1.0), Axis::total_n, 1.0, Window::all);
  CHECK(fit.slope == Approx(-2.0 / 3.0).epsilon(1e-12));
  CHECK(fit.r_squared == Approx(1.0));
  CHECK(fit.points == 9);
  const auto half = fit_slope(synthetic(-0.5, 3.0), Axis::total_n);
  CHECK(half.slope == Approx(-0.5).epsilon(1e-12));
  CHECK(half.intercept == Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(half.points == 5);
}

TEST_CASE("degenerate slope fits are rejected")
{
  RateTable t;
  for (int i = 0; i < 4; ++i)
    t.rows.push_back(RateRow{0, 1000, 0.1, 0.01 * (i + 1), 0.0, 1.0, true});
  CHECK_THROWS_AS(fit_slope(t, Axis::total_n, 1.0, Window::all), std::domain_error);
  RateTable two;
  two.rows = {synthetic(-1, 1).rows[0], synthetic(-1, 1).rows[1]};
  CHECK_THROWS_AS(fit_slope(two, Axis::total_n, 1.0, Window::all), std::domain_error);
}

TEST_CASE("effective sample size")
{
  CHECK(effective_sample_size(300, 50, 1.0) == 350.0);
  CHECK(effective_sample_size(100, 0, 2.0) == 50.0);
  CHECK(effective_sample_size(0, 70, 5.0) == 70.0);
  CHECK_THROWS(effective_sample_size(1, 1, 0.5));
  // n_eff axis: mse = (nP/2 + nQ)^-1 is an exact power law there
  RateTable t;
  const std::size_t grid[][2] = {{512, 0}, {0, 512}, {1024, 512}, {4096, 0}, {2048, 2048}};
  for (auto [p, q] : grid)
    t.rows.push_back(RateRow{p, q, 0.1, 1.0 / effective_sample_size(p, q, 2.0), 0.0, 1.0, true});
  CHECK(fit_slope(t, Axis::n_eff, 2.0, Window::all).slope == Approx(-1.0));
}

TEST_CASE("noise-free zero function gives zero error")
{
  RateSpec spec{.pair = power_pair(1.0), .f_name = "zero", .holder = {}, .n_grid = {{100, 50}}, .bandwidth = {}};
  spec.sigma = 0.0;
  spec.trials = 1;
  const auto t = run_rates(spec);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].mse_mean == 0.0);
  CHECK(t.rows[0].mse_stderr == 0.0);
}

TEST_CASE("rate sweeps are reproducible and decreasing")
{
  RateSpec spec{.pair = SourceTargetPair{Distribution::uniform(), Distribution::uniform(), std::nullopt},
                .f_name = "linear",
                .holder = {},
                .n_grid = {{0, 256}, {0, 1024}, {0, 4096}, {0, 16384}},
                .bandwidth = {}};
  spec.bandwidth.alpha = 1.0;
  spec.trials = 20;
  spec.base_seed = 5;
  const auto a = run_rates(spec, 1);
  const auto b = run_rates(spec, 3);
  REQUIRE(a.rows.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.rows[i].mse_mean == b.rows[i].mse_mean);
    CHECK(a.rows[i].bound_rhs == b.rows[i].bound_rhs);
    CHECK(a.rows[i].mse_mean <= a.rows[i].bound_rhs);
    if (i > 0)
      CHECK(a.rows[i].mse_mean < a.rows[i - 1].mse_mean + 2 * a.rows[i - 1].mse_stderr);
  }
  std::ostringstream csv;
  write_csv(a, csv);
  CHECK(csv.str().rfind("n_p,n_q,h,mse_mean,mse_stderr,bound_rhs\n0,256,", 0) == 0);
}

TEST_CASE("power pair sweep stays below the bound column")
{
  RateSpec spec{.pair = power_pair(1.0),
                .f_name = "linear",
                .holder = {},
                .n_grid = {{512, 0}, {2048, 0}, {8192, 0}},
                .bandwidth = {}};
  spec.trials = 20;
  for (const auto& row : run_rates(spec).rows)
    CHECK(row.mse_mean <= row.bound_rhs);
}

TEST_CASE("rate spec parsing")
{
  const auto j = nlohmann::json::parse(R"({
    "pair": {"kind": "hard_big", "alpha": 2, "C": 3, "M": 8},
    "f": "linear", "beta": 1, "L": 1, "sigma": 1, "trials": 3, "seed": 4,
    "grid": {"n_p": [100, 200], "n_q": [0, 10]},
    "bandwidth": {"rule": "fixed", "h": 0.05}})");
  const auto spec = spec_from_json(j);
  CHECK(spec.n_grid.size() == 2);
  CHECK(spec.n_grid[1] == std::pair<std::size_t, std::size_t>{200, 10});
  CHECK(spec.bandwidth.kind == BandwidthRule::Kind::fixed);
  CHECK(spec.bandwidth.h == 0.05);
  CHECK(spec.base_seed == 4);
  CHECK(declared_alpha(spec.pair) == 2.0);
  CHECK_THROWS_AS(spec_from_json(nlohmann::json::parse(R"({"pair": {"kind": "power", "kappa": 1}})")), config_error);
  CHECK_THROWS_AS(spec_from_json(nlohmann::json::parse(R"({"pair": {"kind": "power", "kappa": 1}, "grid": []})")),
                  config_error);
}
