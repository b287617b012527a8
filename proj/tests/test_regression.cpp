#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "covshift/regression.hpp"
#include "covshift/similarity.hpp"

using namespace covshift;
using namespace covshift::regression;
using Catch::Approx;

TEST_CASE("ball-kernel estimator on a hand example")
{
  const std::vector<double> xs{0.5, 0.125, 0.25};
  const std::vector<double> ys{3.0, 1.0, 2.0};
  const NWModel m(xs, ys, 0.125);
  CHECK(m.estimate(0.375) == Approx(2.5)); // both neighbours sit exactly at distance h
  CHECK(m.estimate(0.0) == Approx(1.0));
  CHECK(m.estimate(0.625) == Approx(3.0));
  CHECK(m.estimate(0.75) == 0.0); // empty ball
  CHECK(m.count_in_ball(0.25) == 2);
  CHECK(m.count_in_ball(0.375) == 2);
  CHECK(nw_estimate(m, 0.1875) == Approx(1.5));
  CHECK_THROWS(NWModel(xs, ys, 0.0));
  CHECK_THROWS(NWModel(xs, std::vector<double>{1.0}, 0.1));
}

TEST_CASE("estimator matches a brute-force average")
{
  const auto pair = power_pair(1.0);
  const auto f = builtin_function("sine", HolderParams{1.0, 1.0});
  const auto data = gen_dataset(pair, f, 0.5, 300, 200, 17);
  const double h = 0.03;
  const NWModel m(data, h);
  for (double x = 0.0; x <= 1.0; x += 0.0137) {
    double s = 0.0;
    int c = 0;
    for (std::size_t i = 0; i < data.xs.size(); ++i) {
      if (std::abs(data.xs[i] - x) <= h) {
        s += data.ys[i];
        ++c;
      }
    }
    CHECK(m.estimate(x) == Approx(c ? s / c : 0.0).margin(1e-12));
  }
}

TEST_CASE("dataset layout and determinism")
{
  const auto pair = hard_pair_big(2.0, 3.0, 8);
  const auto f = builtin_function("linear", HolderParams{1.0, 1.0});
  const auto d = gen_dataset(pair, f, 1.0, 40, 60, 3);
  REQUIRE(d.xs.size() == 100);
  REQUIRE(d.ys.size() == 100);
  CHECK(d.nP == 40);
  CHECK(d.nQ == 60);
  for (std::size_t i = 40; i < 100; ++i)
    CHECK(density(pair.Q, d.xs[i]) > 0.0);
  const auto again = gen_dataset(pair, f, 1.0, 40, 60, 3);
  CHECK(again.xs == d.xs);
  CHECK(again.ys == d.ys);
  const auto quiet = gen_dataset(pair, f, 0.0, 40, 60, 3);
  for (std::size_t i = 0; i < 100; ++i)
    CHECK(quiet.ys[i] == f(quiet.xs[i]));
}

TEST_CASE("noise samplers are centered with the right scale")
{
  const CounterRng rng(99);
  for (const auto& noise : {gaussian_noise(2.0), rademacher_noise(2.0)}) {
    double s = 0.0;
    double s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double e = noise(rng, i);
      s += e;
      s2 += e * e;
    }
    CHECK(std::abs(s / n) < 0.03);
    CHECK(s2 / n == Approx(4.0).epsilon(0.02));
  }
}

TEST_CASE("optimal bandwidth formula")
{
  const HolderParams lip{1.0, 1.0};
  // reference values computed by hand in python
  CHECK(optimal_bandwidth(1000, 100, 1.0, lip, 2.0) == Approx(0.185867139156277).epsilon(1e-12));
  CHECK(optimal_bandwidth(1000, 100, 1.0, lip, 0.5) == Approx(0.07174590868297163).epsilon(1e-12));
  CHECK(optimal_bandwidth(4096, 0, 1.0, lip, 1.0) == Approx(0.07874506561842959).epsilon(1e-12));
  CHECK(optimal_bandwidth(1, 0, 1.0, lip, 1.0) <= 1.0);
  CHECK(bandwidth_regime_ok(100, 0, 1.0, lip));
  CHECK_FALSE(bandwidth_regime_ok(100, 0, 0.5, lip)); // sigma < L
  CHECK_FALSE(bandwidth_regime_ok(3, 0, 1.0, lip));   // max n < 4 sigma^2
}

TEST_CASE("bound evaluator")
{
  CHECK(theorem1_rhs(0.1, HolderParams{1.0, 1.0}, 1.0, 1.0, 1000, 5.0) == Approx(0.035));
  CHECK(std::isinf(theorem1_rhs(0.1, HolderParams{1.0, 1.0}, 1.0, 1.0, 1000, INFINITY)));
}

TEST_CASE("binomial inverse expectation by exact enumeration")
{
  // exact rationals from tests/oracles/compute_oracles.py
  CHECK(expected_inverse_count(1, 0.5, 1, 0.5) == Approx(0.625).epsilon(1e-15));
  CHECK(expected_inverse_count(3, 0.3, 2, 0.6) == Approx(0.524694).epsilon(1e-13));
  CHECK(expected_inverse_count(12, 0.1, 0, 0.5) == Approx(0.526221037627298).epsilon(1e-13));
  CHECK(expected_inverse_count(5, 0.9, 7, 0.1) == Approx(0.20110701370731784).epsilon(1e-13));
  CHECK(expected_inverse_count(0, 0.5, 0, 0.5) == 0.0);
  for (int n = 0; n <= 12; ++n) {
    for (int m = 0; m <= 12; ++m) {
      if (n + m == 0)
        continue;
      for (int a = 1; a <= 9; ++a) {
        const double p = a / 10.0;
        for (int b = 1; b <= 9; ++b) {
          const double q = b / 10.0;
          CHECK(expected_inverse_count(n, p, m, q) <= 4.0 / (n * p + m * q));
        }
      }
    }
  }
}

TEST_CASE("MSE under Q")
{
  const HolderParams lip{1.0, 1.0};
  const auto zero = builtin_function("zero", lip);
  const auto uu = SourceTargetPair{Distribution::uniform(), Distribution::uniform(), std::nullopt};
  MseConfig cfg;
  cfg.trials = 3;
  cfg.eval_points = 200;
  const auto quiet = mse_under_q(uu, zero, 0.0, 100, 100, 0.1, cfg);
  CHECK(quiet.mean == 0.0);
  CHECK(quiet.std_error == 0.0);

  // exact evaluation against a point mass target
  const auto small = hard_pair_small(1.0);
  const auto lin = builtin_function("linear", lip);
  cfg.trials = 4;
  const auto r1 = mse_under_q(small, lin, 1.0, 500, 0, 0.05, cfg, 1);
  const auto r4 = mse_under_q(small, lin, 1.0, 500, 0, 0.05, cfg, 4);
  CHECK(r1.per_trial == r4.per_trial); // thread count does not change results
  CHECK(r1.per_trial.size() == 4);
  for (std::size_t t = 0; t < 4; ++t) {
    const auto data = gen_dataset(small, lin, 1.0, 500, 0, derive_seed(cfg.seed, t, 0));
    const double e = NWModel(data, 0.05).estimate(1.0) - 1.0;
    CHECK(r1.per_trial[t] == Approx(e * e));
  }
}

TEST_CASE("MSE stays below the bound on the uniform pair")
{
  const HolderParams lip{1.0, 1.0};
  const auto lin = builtin_function("linear", lip);
  const auto uu = SourceTargetPair{Distribution::uniform(), Distribution::uniform(), std::nullopt};
  const std::size_t n = 2000;
  const double h = optimal_bandwidth(0, n, 1.0, lip, 1.0);
  MseConfig cfg;
  cfg.trials = 40;
  const auto r = mse_under_q(uu, lin, 1.0, 0, n, h, cfg);
  const double rho = similarity::rho(uu.P, uu.Q, h).value;
  CHECK(r.mean <= theorem1_rhs(h, lip, lin.sup_norm, 1.0, n, rho));
}
