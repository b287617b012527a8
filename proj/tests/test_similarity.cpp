#include <catch_amalgamated.hpp>

#include <cmath>

#include "covshift/similarity.hpp"

using namespace covshift;
using namespace covshift::similarity;
using Catch::Approx;

namespace {

// closed form for uniform against itself
double rho_uniform(double h)
{
  if (h >= 1.0)
    return 1.0;
  if (h <= 0.5)
    return (1.0 - 2.0 * h) / (2.0 * h) + 2.0 * std::log(2.0);
  return 2.0 * std::log(1.0 / h) + 2.0 * h - 1.0;
}

RhoOptions quad()
{
  RhoOptions o;
  o.method = Method::quadrature;
  return o;
}

} // namespace

TEST_CASE("rho against a point mass is the reciprocal ball mass")
{
  const auto pair = hard_pair_small(2.0);
  const auto r = rho(pair.P, pair.Q, 0.1);
  CHECK(r.method == Method::closed_form);
  CHECK(r.value == Approx(100.0).epsilon(1e-12));
  CHECK(r.std_error == 0.0);
}

TEST_CASE("rho of uniform against uniform")
{
  const auto u = Distribution::uniform();
  for (double h : {0.001, 0.01, 0.1, 0.3, 0.5, 0.7, 0.99, 1.0, 2.0}) {
    INFO("h = " << h);
    CHECK(rho(u, u, h, quad()).value == Approx(rho_uniform(h)).epsilon(1e-10));
  }
}

TEST_CASE("rho on cataloged pairs matches independent quadrature")
{
  // reference values from tests/oracles/compute_oracles.py
  const auto pp = power_pair(1.0);
  CHECK(rho(pp.P, pp.Q, 0.1, quad()).value == Approx(10.866668644255658).epsilon(1e-10));
  CHECK(rho(pp.P, pp.Q, 0.02, quad()).value == Approx(73.999403502394812).epsilon(1e-10));
  const auto p2 = power_pair(2.0);
  CHECK(rho(p2.P, p2.Q, 0.05, quad()).value == Approx(207.20086856792867).epsilon(1e-10));
  const auto hb = hard_pair_big(2.0, 3.0, 8);
  CHECK(rho(hb.P, hb.Q, 0.003, quad()).value == Approx(379.55217704709183).epsilon(1e-10));
  CHECK(rho(hb.P, hb.Q, 0.01, quad()).value == Approx(9.4173631586817713).epsilon(1e-10));
  CHECK(rho(hb.P, hb.Q, 0.05, quad()).value == Approx(2.2288186478070601).epsilon(1e-10));
  const auto mix = Distribution::mixture({{0.5, Distribution::uniform()}, {0.5, Distribution::power(1.0)}});
  CHECK(rho(mix, Distribution::uniform(), 0.1, quad()).value == Approx(5.9342532426574591).epsilon(1e-10));
}

TEST_CASE("Monte-Carlo rho agrees with quadrature within its error")
{
  const auto pp = power_pair(1.0);
  RhoOptions mc;
  mc.method = Method::monte_carlo;
  mc.mc_samples = 200000;
  mc.seed = 5;
  const auto est = rho(pp.P, pp.Q, 0.1, mc);
  CHECK(est.std_error > 0.0);
  CHECK(std::abs(est.value - 10.866668644255658) < 4.0 * est.std_error);
  CHECK(rho(pp.P, pp.Q, 0.1, mc).value == est.value);
}

TEST_CASE("infinite rho is reported with a witness")
{
  const auto P = Distribution::point_mass(0.2);
  const auto Q = Distribution::uniform();
  const auto r = rho(P, Q, 0.1, quad());
  CHECK(std::isinf(r.value));
  REQUIRE(r.witness);
  CHECK(ball_prob(P, *r.witness, 0.1) == 0.0);
  RhoOptions mc;
  mc.method = Method::monte_carlo;
  CHECK(std::isinf(rho(P, Q, 0.1, mc).value));
  // asymmetry: the other direction is finite
  CHECK(std::isfinite(rho(Q, P, 0.1).value));
}

TEST_CASE("method parsing")
{
  CHECK(method_from_string("auto") == Method::automatic);
  CHECK(method_from_string("quad") == Method::quadrature);
  CHECK(method_from_string("mc") == Method::monte_carlo);
  CHECK_THROWS(method_from_string("simpson"));
  CHECK_THROWS(rho(Distribution::uniform(), Distribution::uniform(), 0.0));
}

TEST_CASE("geometric grid")
{
  const auto g = default_h_grid();
  REQUIRE(g.size() == 200);
  CHECK(g.front() == Approx(1e-3));
  CHECK(g.back() == 1.0);
  for (std::size_t i = 1; i < g.size(); ++i)
    CHECK(g[i] / g[i - 1] == Approx(g[1] / g[0]));
}

TEST_CASE("family verification")
{
  const auto g = default_h_grid();
  const auto small = hard_pair_small(0.5);
  const auto rep = verify_family(small, FamilyDecl{FamilyKind::small, 0.5, 1.0}, g);
  CHECK(rep.member);
  CHECK(rep.sup_statistic == Approx(1.0).epsilon(1e-9));
  CHECK(rep.self_sup == Approx(1.0));

  const auto big = hard_pair_big(2.0, 12.0, 16);
  CHECK(verify_family(big, FamilyDecl{FamilyKind::big, 2.0, 12.0}, g).member);

  // uniform pair: sup of h rho_h is 1, attained at h = 1
  SourceTargetPair uu{Distribution::uniform(), Distribution::uniform(), std::nullopt};
  const auto ur = verify_family(uu, FamilyDecl{FamilyKind::big, 1.0, 1.0 + 2.0 * std::log(2.0)}, g);
  CHECK(ur.member);
  CHECK(ur.sup_statistic == Approx(1.0).epsilon(1e-9));
  // alpha = 0.5 fails: h^0.5 rho_h blows up as h -> 0
  CHECK_FALSE(verify_family(uu, FamilyDecl{FamilyKind::big, 0.5, 3.0}, g).member);

  SourceTargetPair bad{Distribution::point_mass(0.2), Distribution::uniform(), std::nullopt};
  const auto br = verify_family(bad, FamilyDecl{FamilyKind::big, 1.0, 10.0}, g);
  CHECK_FALSE(br.member);
  CHECK(br.witness.has_value());
}

TEST_CASE("ball ratio and covering bound")
{
  const auto u = Distribution::uniform();
  const auto xs = geometric_grid(1e-3, 1.0, 50);
  const auto br = min_ball_ratio(u, u, 0.1, xs);
  CHECK(br.lambda == Approx(1.0));
  CHECK(br.covering_bound == Approx(10.0)); // N(0.05) = 10
  CHECK(rho(u, u, 0.1).value <= br.covering_bound);
  const auto pp = power_pair(1.0);
  const auto pr = min_ball_ratio(pp.P, pp.Q, 0.1, xs);
  CHECK(rho(pp.P, pp.Q, 0.1).value <= pr.covering_bound * (1 + 1e-12));
}

TEST_CASE("transfer exponent and the inclusion bound")
{
  const auto g = default_h_grid();
  const auto xs = geometric_grid(1e-3, 1.0, 200);
  const auto pp = power_pair(1.0);
  const auto tr = transfer_exponent_holds(pp, 1.0, 1.0, g, xs);
  CHECK(tr.fitted_K > 0.0);
  CHECK(tr.fitted_K <= 1.0);
  CHECK(transfer_exponent_holds(pp, 1.0, tr.fitted_K, g, xs).holds);
  const auto l4 = lemma4_check(pp, 1.0, tr.fitted_K, g);
  CHECK(l4.holds);
  CHECK(l4.bound == Approx(2.0 / tr.fitted_K));
  // gamma below kappa cannot hold with any K near x = 0
  CHECK(transfer_exponent_holds(pp, 0.5, 1.0, g, xs).fitted_K < 0.1);
}
