#include "covshift/lowerbound.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "covshift/quadrature.hpp"
#include "covshift/rng.hpp"

namespace covshift::lowerbound {

double bump(double x)
{
  if (!(std::abs(x) < 1.0))
    return 0.0;
  return std::exp(-1.0 / (1.0 - x * x));
}

double c_psi_sq()
{
  static const double value = [] {
    // Symmetric; integrate one half and split where the integrand changes
    // scale.
    const double knots[] = {0.5, 0.8, 0.9, 0.95};
    const auto r = integrate_piecewise([](double x) { return bump(x) * bump(x); }, 0.0, 1.0, knots, 1e-16);
    return 2.0 * r.value;
  }();
  return value;
}

PackingParams PackingParams::from_hard(const HardPairParams& hard, const HolderParams& holder)
{
  return PackingParams{hard.M, hard.r, holder, hard.S};
}

void PackingParams::validate() const
{
  holder.validate();
  if (M < 1)
    throw std::domain_error("packing: M must be positive");
  if (!(r > 0.0))
    throw std::domain_error("packing: r must be positive");
  if (std::abs(6.0 * M * r - S) > 1e-12 * S)
    throw std::domain_error("packing: need 6 M r = S");
}

int hamming(std::uint64_t a, std::uint64_t b)
{
  return std::popcount(a ^ b);
}

int BinaryCode::min_distance() const
{
  int best = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < words.size(); ++i)
    for (std::size_t k = i + 1; k < words.size(); ++k)
      best = std::min(best, hamming(words[i], words[k]));
  return words.size() < 2 ? 0 : best;
}

namespace {

// Bijection on M-bit integers: odd multipliers and right xorshifts are both
// invertible modulo 2^M.
std::uint64_t scramble(std::uint64_t i, int M, std::uint64_t mask)
{
  const int shift = std::max(1, M / 2);
  std::uint64_t x = (i * 0x5851f42d4c957f2dULL + 0x14057b7ef767814fULL) & mask;
  x ^= x >> shift;
  x = (x * 0xbf58476d1ce4e5b9ULL) & mask;
  x ^= x >> (shift + (M > 2 ? 1 : 0)) ;
  return x & mask;
}

} // namespace

BinaryCode gv_code(int M)
{
  if (M < 8)
    throw std::domain_error("gv_code: M must be at least 8");
  if (M % 8 != 0)
    throw std::domain_error("gv_code: M must be a multiple of 8");
  if (M > 64)
    throw std::domain_error("gv_code: M above 64 is not supported");
  const std::uint64_t mask = M == 64 ? ~0ULL : ((1ULL << M) - 1);
  const int min_dist = M / 8;
  const std::size_t target = std::size_t{1} << (M / 8);

  BinaryCode code;
  code.M = M;
  for (std::uint64_t i = 0;; ++i) {
    const std::uint64_t w = scramble(i, M, mask);
    bool ok = true;
    for (std::uint64_t kept : code.words) {
      if (hamming(kept, w) < min_dist) {
        ok = false;
        break;
      }
    }
    if (ok)
      code.words.push_back(w);
    if (code.words.size() >= target || i == mask)
      break;
  }
  return code;
}

RegressionFunction packing_function(std::uint64_t word, const PackingParams& params)
{
  params.validate();
  const double scale = params.holder.L * std::pow(params.r, params.holder.beta);
  const double r = params.r;
  const int M = params.M;
  RegressionFunction f;
  f.name = "packing";
  f.eval = [=](double x) {
    if (!(x > 0.0 && x < 6.0 * M * r))
      return 0.0;
    const int j = std::clamp(static_cast<int>(std::floor(x / (6.0 * r))) + 1, 1, M);
    if (!BinaryCode::bit(word, j))
      return 0.0;
    const double z = (6.0 * j - 3.0) * r;
    return scale * bump((x - z) / r);
  };
  f.sup_norm = std::popcount(word) > 0 ? scale * std::exp(-1.0) : 0.0;
  for (int j = 1; j <= M; ++j) {
    const double z = params.center(j);
    f.kinks.push_back(z - r);
    f.kinks.push_back(z);
    f.kinks.push_back(z + r);
  }
  return f;
}

RegressionFunction two_point_function(double t, const HolderParams& holder)
{
  holder.validate();
  if (!(t >= 0.0 && t <= 1.0))
    throw std::domain_error("two_point_function: t must lie in [0, 1]");
  const double L = holder.L;
  const double beta = holder.beta;
  RegressionFunction f;
  f.name = "ramp";
  f.eval = [=](double x) { return x > t ? L * std::pow(x - t, beta) : 0.0; };
  f.sup_norm = L * std::pow(1.0 - t, beta);
  f.kinks = {t};
  return f;
}

double squared_distance(const RegressionFunction& f, const RegressionFunction& g, const Distribution& mu)
{
  std::vector<double> breaks = f.kinks;
  breaks.insert(breaks.end(), g.kinks.begin(), g.kinks.end());
  return integrate_against(
    mu,
    [&](double x) {
      const double d = f(x) - g(x);
      return d * d;
    },
    breaks,
    1e-16);
}

double kl_divergence(const RegressionFunction& f,
                     const RegressionFunction& g,
                     const SourceTargetPair& pair,
                     std::size_t nP,
                     std::size_t nQ,
                     double sigma)
{
  if (!(sigma > 0.0))
    throw std::domain_error("kl_divergence: sigma must be positive");
  double total = 0.0;
  if (nP > 0)
    total += static_cast<double>(nP) * squared_distance(f, g, pair.P);
  if (nQ > 0)
    total += static_cast<double>(nQ) * squared_distance(f, g, pair.Q);
  return total / (2.0 * sigma * sigma);
}

double calibrate_fano_radius(double alpha,
                             double C,
                             const HolderParams& holder,
                             double sigma,
                             std::size_t nP,
                             std::size_t nQ)
{
  holder.validate();
  if (nP + nQ == 0)
    throw std::domain_error("calibrate_fano_radius: nP + nQ must be positive");
  if (!(sigma > 0.0))
    throw std::domain_error("calibrate_fano_radius: sigma must be positive");
  const double beta = holder.beta;
  const double k = 64.0 * std::pow(4.0, alpha) / C * holder.L * holder.L / (sigma * sigma);
  const double source = std::pow(k * static_cast<double>(nP), (2.0 * beta + 1.0) / (2.0 * beta + alpha));
  const double target = k * static_cast<double>(nQ);
  return std::pow(source + target, -1.0 / (2.0 * beta + 1.0));
}

double calibrate_lecam_offset(double alpha, const HolderParams& holder, double sigma, std::size_t nP, std::size_t nQ)
{
  holder.validate();
  if (nP + nQ == 0)
    throw std::domain_error("calibrate_lecam_offset: nP + nQ must be positive");
  if (!(sigma > 0.0))
    throw std::domain_error("calibrate_lecam_offset: sigma must be positive");
  const double beta = holder.beta;
  const double k = holder.L * holder.L / (2.0 * sigma * sigma);
  const double denom = std::pow(k * static_cast<double>(nP), 1.0 / (2.0 * beta + alpha)) +
                       std::pow(k * static_cast<double>(nQ), 1.0 / (2.0 * beta));
  const double one_minus_t = std::min(1.0, 1.0 / denom);
  return 1.0 - one_minus_t;
}

HolderCertificate holder_certificate(const RegressionFunction& f,
                                     const HolderParams& holder,
                                     std::size_t num_pairs,
                                     std::uint64_t seed)
{
  holder.validate();
  if (num_pairs == 0)
    throw std::domain_error("holder_certificate: num_pairs must be positive");
  HolderCertificate cert;
  auto check = [&](double x, double y) {
    x = std::clamp(x, 0.0, 1.0);
    y = std::clamp(y, 0.0, 1.0);
    if (x == y)
      return;
    ++cert.pairs_checked;
    const double ratio = std::abs(f(x) - f(y)) / (holder.L * std::pow(std::abs(x - y), holder.beta));
    if (ratio > cert.max_ratio) {
      cert.max_ratio = ratio;
      cert.worst_x = x;
      cert.worst_y = y;
    }
  };

  const CounterRng rng(seed);
  // Half global pairs, half local pairs at log-uniform separations.
  for (std::size_t i = 0; i < num_pairs; ++i) {
    const double x = rng.uniform(3 * i);
    if (i % 2 == 0) {
      check(x, rng.uniform(3 * i + 1));
    } else {
      const double delta = std::pow(10.0, -1.0 - 7.0 * rng.uniform(3 * i + 1));
      check(x, x + delta);
    }
  }
  constexpr int grid = 2000;
  for (int i = 0; i < grid; ++i)
    check(static_cast<double>(i) / grid, static_cast<double>(i + 1) / grid);
  std::vector<double> specials = f.kinks;
  specials.push_back(0.0);
  specials.push_back(1.0);
  for (double k : specials) {
    for (double delta = 1e-1; delta >= 1e-9; delta /= 10.0) {
      check(k, k + delta);
      check(k, k - delta);
    }
  }
  check(0.0, 1.0);
  cert.pass = cert.max_ratio <= 1.0 + 1e-9 && f(0.0) == 0.0;
  return cert;
}

FanoReport fano_calibration(double alpha,
                            double C,
                            const HolderParams& holder,
                            double sigma,
                            std::size_t nP,
                            std::size_t nQ,
                            std::optional<int> M)
{
  FanoReport rep;
  const auto base = hard_pair_params(alpha, C, 8);
  rep.S = base.S;
  rep.r_calibrated = calibrate_fano_radius(alpha, C, holder, sigma, nP, nQ);
  rep.M_implied = rep.S / (6.0 * rep.r_calibrated);
  if (M) {
    rep.M = *M;
  } else {
    const double blocks = std::ceil(rep.M_implied / 8.0 - 1e-12);
    rep.M = std::max(32, 8 * static_cast<int>(blocks));
  }
  const auto pair = hard_pair_big(alpha, C, rep.M);
  rep.r_used = pair.hard_params()->r;
  rep.radius_consistent = rep.r_used <= rep.r_calibrated * (1.0 + 1e-12);
  rep.m_at_least_32 = rep.M >= 32;
  rep.sample_threshold =
    std::pow(72.0 * sigma * sigma * C / (holder.L * holder.L * std::pow(4.0, alpha)), 2.0 * holder.beta + alpha);
  rep.sample_size_ok = static_cast<double>(std::max(nP, nQ)) >= rep.sample_threshold;
  rep.kl_threshold = rep.M / 32.0;

  const auto code = gv_code(rep.M);
  rep.code_size = code.size();
  rep.min_distance = code.min_distance();
  const auto params = PackingParams::from_hard(*pair.hard_params(), holder);
  std::vector<RegressionFunction> fs;
  fs.reserve(code.size());
  for (auto w : code.words)
    fs.push_back(packing_function(w, params));
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t k = i + 1; k < fs.size(); ++k)
      rep.max_kl = std::max(rep.max_kl, kl_divergence(fs[i], fs[k], pair, nP, nQ, sigma));
  rep.kl_ok = rep.max_kl <= rep.kl_threshold;
  return rep;
}

LeCamReport lecam_calibration(double alpha, const HolderParams& holder, double sigma, std::size_t nP, std::size_t nQ)
{
  LeCamReport rep;
  rep.t = calibrate_lecam_offset(alpha, holder, sigma, nP, nQ);
  const auto pair = hard_pair_small(alpha);
  const auto ft = two_point_function(rep.t, holder);
  const RegressionFunction zero{"zero", [](double) { return 0.0; }, 0.0, {}};
  rep.kl = kl_divergence(ft, zero, pair, nP, nQ, sigma);
  const double s = 1.0 - rep.t;
  const double beta = holder.beta;
  rep.kl_formula = holder.L * holder.L / (2.0 * sigma * sigma) *
                   (static_cast<double>(nP) * std::pow(s, 2.0 * beta + alpha) +
                    static_cast<double>(nQ) * std::pow(s, 2.0 * beta));
  rep.kl_ok = rep.kl <= 2.0;
  return rep;
}

} // namespace covshift::lowerbound
