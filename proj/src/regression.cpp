#include "covshift/regression.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "covshift/parallel.hpp"

namespace covshift {

unsigned default_thread_count()
{
  if (const char* env = std::getenv("COVSHIFT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0)
      return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace covshift

namespace covshift::regression {

NoiseSampler gaussian_noise(double sigma)
{
  return [sigma](const CounterRng& stream, std::uint64_t index) { return sigma * stream.gaussian(index); };
}

NoiseSampler rademacher_noise(double sigma)
{
  return [sigma](const CounterRng& stream, std::uint64_t index) {
    return (stream.bits(index) & 1u) ? sigma : -sigma;
  };
}

Dataset gen_dataset(const SourceTargetPair& pair,
                    const RegressionFunction& f,
                    double sigma,
                    std::size_t nP,
                    std::size_t nQ,
                    std::uint64_t seed,
                    const NoiseSampler& noise)
{
  if (nP + nQ == 0)
    throw std::domain_error("gen_dataset: nP + nQ must be positive");
  if (!(sigma >= 0.0))
    throw std::domain_error("gen_dataset: sigma must be nonnegative");
  const CounterRng base(seed);
  const auto source_stream = base.substream(1);
  const auto target_stream = base.substream(2);
  const auto noise_stream = base.substream(3);
  const auto& xi = noise ? noise : gaussian_noise(sigma);

  Dataset d;
  d.nP = nP;
  d.nQ = nQ;
  d.sigma = sigma;
  d.xs.resize(nP + nQ);
  d.ys.resize(nP + nQ);
  for (std::size_t i = 0; i < nP; ++i)
    d.xs[i] = draw(pair.P, source_stream, i);
  for (std::size_t i = 0; i < nQ; ++i)
    d.xs[nP + i] = draw(pair.Q, target_stream, i);
  for (std::size_t i = 0; i < nP + nQ; ++i)
    d.ys[i] = f(d.xs[i]) + (sigma > 0.0 || noise ? xi(noise_stream, i) : 0.0);
  return d;
}

NWModel::NWModel(std::span<const double> xs, std::span<const double> ys, double h) : h_(h)
{
  if (xs.size() != ys.size())
    throw std::invalid_argument("NWModel: xs and ys differ in length");
  if (xs.empty())
    throw std::domain_error("NWModel: empty data");
  if (!(h > 0.0))
    throw std::domain_error("NWModel: bandwidth must be positive");
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  xs_.resize(xs.size());
  prefix_.resize(xs.size() + 1);
  prefix_[0] = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    xs_[i] = xs[order[i]];
    prefix_[i + 1] = prefix_[i] + ys[order[i]];
  }
}

std::pair<std::size_t, std::size_t> NWModel::window(double x) const
{
  // Closed ball |x - x_i| <= h, evaluated with the same arithmetic as the
  // definition so ties at distance exactly h are included.
  const auto lo = std::partition_point(xs_.begin(), xs_.end(), [&](double xi) { return x - xi > h_; });
  const auto hi = std::partition_point(lo, xs_.end(), [&](double xi) { return xi - x <= h_; });
  return {static_cast<std::size_t>(lo - xs_.begin()), static_cast<std::size_t>(hi - xs_.begin())};
}

std::size_t NWModel::count_in_ball(double x) const
{
  const auto [lo, hi] = window(x);
  return hi - lo;
}

double NWModel::estimate(double x) const
{
  const auto [lo, hi] = window(x);
  if (hi == lo)
    return 0.0;
  return (prefix_[hi] - prefix_[lo]) / static_cast<double>(hi - lo);
}

double nw_estimate(const NWModel& model, double x)
{
  return model.estimate(x);
}

double optimal_bandwidth(std::size_t nP, std::size_t nQ, double sigma, const HolderParams& holder, double alpha)
{
  holder.validate();
  if (nP + nQ == 0)
    throw std::domain_error("optimal_bandwidth: nP + nQ must be positive");
  if (!(alpha > 0.0))
    throw std::domain_error("optimal_bandwidth: alpha must be positive");
  const double eta = alpha >= 1.0 ? 1.0 : 0.0;
  const double beta = holder.beta;
  const double scale = holder.L * holder.L + sigma * sigma;
  const double source = std::pow(static_cast<double>(nP) / scale, (2.0 * beta + eta) / (2.0 * beta + alpha));
  const double total = static_cast<double>(nQ) / scale + source;
  const double h = std::pow(total, -1.0 / (2.0 * beta + eta));
  return std::min(h, 1.0);
}

bool bandwidth_regime_ok(std::size_t nP, std::size_t nQ, double sigma, const HolderParams& holder)
{
  return sigma >= holder.L && static_cast<double>(std::max(nP, nQ)) >= 4.0 * sigma * sigma;
}

double theorem1_rhs(double h, const HolderParams& holder, double f_sup, double sigma, std::size_t n, double rho_mu_q)
{
  if (n == 0)
    throw std::domain_error("theorem1_rhs: n must be positive");
  const double bias = holder.L * holder.L * std::pow(h, 2.0 * holder.beta);
  return bias + (4.0 * sigma * sigma + f_sup * f_sup) * rho_mu_q / static_cast<double>(n);
}

namespace {

std::vector<double> binomial_pmf(int n, double p)
{
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    const double log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    double v = std::exp(log_choose);
    v *= (k == 0) ? 1.0 : std::pow(p, k);
    v *= (n - k == 0) ? 1.0 : std::pow(1.0 - p, n - k);
    pmf[static_cast<std::size_t>(k)] = v;
  }
  return pmf;
}

} // namespace

double expected_inverse_count(int n, double p, int m, double q)
{
  if (n < 0 || m < 0)
    throw std::domain_error("expected_inverse_count: negative trial count");
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0))
    throw std::domain_error("expected_inverse_count: probabilities must lie in [0, 1]");
  const auto pu = binomial_pmf(n, p);
  const auto pv = binomial_pmf(m, q);
  double total = 0.0;
  for (int u = 0; u <= n; ++u) {
    for (int v = 0; v <= m; ++v) {
      if (u + v == 0)
        continue;
      total += pu[static_cast<std::size_t>(u)] * pv[static_cast<std::size_t>(v)] / (u + v);
    }
  }
  return total;
}

double squared_error_under_q(const NWModel& model,
                             const RegressionFunction& f,
                             const Distribution& Q,
                             std::size_t eval_points,
                             const CounterRng& stream)
{
  const auto point_masses = atoms(Q);
  double atom_weight = 0.0;
  for (const auto& a : point_masses)
    atom_weight += a.second;
  if (!point_masses.empty() && atom_weight >= 1.0 - 1e-12) {
    double total = 0.0;
    for (auto [loc, w] : point_masses) {
      const double e = model(loc) - f(loc);
      total += w * e * e;
    }
    return total;
  }
  if (eval_points == 0)
    throw std::domain_error("squared_error_under_q: eval_points must be positive");
  double total = 0.0;
  for (std::size_t j = 0; j < eval_points; ++j) {
    const double x = draw(Q, stream, j);
    const double e = model(x) - f(x);
    total += e * e;
  }
  return total / static_cast<double>(eval_points);
}

MseResult mse_under_q(const SourceTargetPair& pair,
                      const RegressionFunction& f,
                      double sigma,
                      std::size_t nP,
                      std::size_t nQ,
                      double h,
                      const MseConfig& config,
                      unsigned threads)
{
  if (config.trials == 0)
    throw std::domain_error("mse_under_q: trials must be positive");
  MseResult out;
  out.per_trial.resize(config.trials);
  parallel_for(config.trials, threads, [&](std::size_t t) {
    const auto data = gen_dataset(pair, f, sigma, nP, nQ, derive_seed(config.seed, t, 0), config.noise);
    const NWModel model(data, h);
    out.per_trial[t] = squared_error_under_q(model, f, pair.Q, config.eval_points,
                                             CounterRng(derive_seed(config.seed, t, 1)));
  });
  double mean = 0.0;
  for (double v : out.per_trial)
    mean += v;
  mean /= static_cast<double>(config.trials);
  double ss = 0.0;
  for (double v : out.per_trial)
    ss += (v - mean) * (v - mean);
  out.mean = mean;
  out.std_error = config.trials > 1
                    ? std::sqrt(ss / static_cast<double>(config.trials - 1) / static_cast<double>(config.trials))
                    : 0.0;
  return out;
}

} // namespace covshift::regression
