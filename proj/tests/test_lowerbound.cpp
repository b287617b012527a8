#include <catch_amalgamated.hpp>

#include <bit>
#include <cmath>

#include "covshift/lowerbound.hpp"

using namespace covshift;
using namespace covshift::lowerbound;
using Catch::Approx;

TEST_CASE("bump function")
{
  CHECK(bump(0.0) == Approx(std::exp(-1.0)));
  CHECK(bump(1.0) == 0.0);
  CHECK(bump(-1.5) == 0.0);
  CHECK(bump(0.5) == Approx(std::exp(-1.0 / 0.75)));
  // scipy / mpmath reference
  CHECK(c_psi_sq() == Approx(0.13308612084499427).epsilon(1e-12));
}

TEST_CASE("greedy code meets size and distance targets")
{
  for (int M : {8, 16, 24, 32, 64}) {
    const auto code = gv_code(M);
    INFO("M = " << M);
    CHECK(code.size() >= static_cast<std::size_t>(std::ldexp(1.0, M / 8)));
    // exhaustive pairwise check
    int dmin = M;
    for (std::size_t i = 0; i < code.size(); ++i) {
      CHECK((M == 64 || code.words[i] >> M == 0));
      for (std::size_t j = i + 1; j < code.size(); ++j)
        dmin = std::min(dmin, hamming(code.words[i], code.words[j]));
    }
    CHECK(dmin >= M / 8);
    CHECK(code.min_distance() == dmin);
  }
  CHECK(hamming(0b1011, 0b0001) == 2);
  CHECK_THROWS(gv_code(12));
  CHECK_THROWS(gv_code(72));
}

TEST_CASE("packing functions")
{
  const HolderParams lip{1.0, 1.0};
  const auto hp = hard_pair_params(2.0, 3.0, 8);
  const auto pp = PackingParams::from_hard(hp, lip);
  const auto pair = hard_pair_big(2.0, 3.0, 8);
  const auto zero = builtin_function("zero", lip);
  const std::uint64_t word = 0b10110001;
  const auto f = packing_function(word, pp);
  for (int j = 1; j <= 8; ++j) {
    const double want = BinaryCode::bit(word, j) ? lip.L * pp.r * std::exp(-1.0) : 0.0;
    CHECK(f(pp.center(j)) == Approx(want).margin(1e-18));
  }
  CHECK(f(0.5) == 0.0);
  CHECK(f(0.0) == 0.0);
  CHECK(holder_certificate(f, lip, 20000, 1).pass);
  const double ones = std::popcount(word);
  // exact norms: |b| C^2 L^2 r^(2 beta) / (2M) under Q, |b| eps C^2 L^2 r^(2 beta + alpha) / S^alpha under P
  CHECK(squared_distance(f, zero, pair.Q) ==
        Approx(ones * c_psi_sq() * pp.r * pp.r / 16.0).epsilon(1e-9));
  CHECK(squared_distance(f, zero, pair.P) ==
        Approx(ones * hp.epsilon * c_psi_sq() * std::pow(pp.r, 4.0) / (hp.S * hp.S)).epsilon(1e-9));
}

TEST_CASE("two-point function")
{
  const HolderParams h{0.5, 2.0};
  const auto f = two_point_function(0.9, h);
  CHECK(f(0.5) == 0.0);
  CHECK(f(1.0) == Approx(2.0 * std::sqrt(0.1)));
  CHECK(f.sup_norm == Approx(2.0 * std::sqrt(0.1)));
  CHECK(holder_certificate(f, h, 20000, 2).pass);
  // a function steeper than allowed fails the certificate
  auto steep = f;
  steep.eval = [](double x) { return 3.0 * x; };
  CHECK_FALSE(holder_certificate(steep, HolderParams{1.0, 1.0}, 2000, 2).pass);
}

TEST_CASE("two-point divergence")
{
  // reference norms from tests/oracles/compute_oracles.py
  const HolderParams lip{1.0, 1.0};
  const auto pair = hard_pair_small(2.0);
  const auto f = two_point_function(0.8, lip);
  const auto zero = builtin_function("zero", lip);
  CHECK(squared_distance(f, zero, pair.P) == Approx(0.00026666666666666643).epsilon(1e-9));
  CHECK(kl_divergence(f, zero, pair, 1000, 10, 2.0) == Approx((1000 * 0.00026666666666666643 + 10 * 0.04) / 8.0));
  const HolderParams h{0.5, 1.0};
  const auto g = two_point_function(0.9, h);
  CHECK(squared_distance(g, zero, hard_pair_small(0.5).P) == Approx(0.021081851067789188).epsilon(1e-9));
}

TEST_CASE("calibrated offset keeps the divergence bounded")
{
  const HolderParams lip{1.0, 1.0};
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (std::size_t nP : {0, 10, 1000, 1000000}) {
      for (std::size_t nQ : {0, 10, 1000, 1000000}) {
        if (nP + nQ == 0)
          continue;
        const auto rep = lecam_calibration(alpha, lip, 1.0, nP, nQ);
        // the source term of the closed form bounds the exact norm from above
        CHECK(rep.kl <= rep.kl_formula * (1.0 + 1e-9));
        CHECK(rep.kl_formula <= 2.0 * (1.0 + 1e-12));
        CHECK(rep.kl_ok);
        CHECK(rep.t >= 0.0);
        CHECK(rep.t < 1.0);
      }
    }
  }
}

TEST_CASE("calibrated radius keeps pairwise divergences below M / 32")
{
  const HolderParams lip{1.0, 1.0};
  const auto rep = fano_calibration(2.0, 3.0, lip, 1.0, 100000, 1000);
  CHECK(rep.M >= 32);
  CHECK(rep.M % 8 == 0);
  CHECK(rep.radius_consistent);
  CHECK(rep.kl_ok);
  CHECK(rep.max_kl <= rep.kl_threshold);
  CHECK(rep.kl_threshold == Approx(rep.M / 32.0));

  // large n where the calibrated radius, not the M >= 32 floor, sets M
  const auto big = fano_calibration(1.0, 1.0, lip, 1.0, 600000000, 0);
  CHECK(big.M_implied >= 32.0);
  CHECK(big.M_implied <= 64.0);
  CHECK(big.radius_consistent);
  CHECK(big.kl_ok);
  CHECK(big.max_kl > 0.1 * big.kl_threshold);

  // a user M that is too small for the calibrated radius is flagged
  const auto bad = fano_calibration(1.0, 1.0, lip, 1.0, 600000000, 0, 8);
  CHECK_FALSE(bad.radius_consistent);
  CHECK_FALSE(bad.m_at_least_32);
}
