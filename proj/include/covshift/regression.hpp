#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "covshift/distributions.hpp"
#include "covshift/functions.hpp"

namespace covshift::regression {

// Centered noise draw keyed by (stream, index).
using NoiseSampler = std::function<double(const CounterRng& stream, std::uint64_t index)>;

NoiseSampler gaussian_noise(double sigma);
NoiseSampler rademacher_noise(double sigma);

struct Dataset
{
  std::vector<double> xs;
  std::vector<double> ys;
  std::size_t nP = 0; // first nP covariates come from P, the rest from Q
  std::size_t nQ = 0;
  double sigma = 0.0;
};

/// nP draws from P, then nQ draws from Q, with y = f(x) + noise.
/// Gaussian noise of standard deviation sigma unless `noise` is given.
Dataset gen_dataset(const SourceTargetPair& pair,
                    const RegressionFunction& f,
                    double sigma,
                    std::size_t nP,
                    std::size_t nQ,
                    std::uint64_t seed,
                    const NoiseSampler& noise = {});

// Ball-kernel Nadaraya-Watson fit: mean of the responses whose covariate lies
// in the closed ball [x - h, x + h]; exactly 0 when that ball is empty.
class NWModel
{
public:
  NWModel(std::span<const double> xs, std::span<const double> ys, double h);
  explicit NWModel(const Dataset& data, double h) : NWModel(data.xs, data.ys, h) {}

  double bandwidth() const { return h_; }
  std::size_t size() const { return xs_.size(); }
  std::span<const double> covariates() const { return xs_; }

  double estimate(double x) const;
  double operator()(double x) const { return estimate(x); }

  // Number of covariates in the closed ball around x.
  std::size_t count_in_ball(double x) const;

private:
  std::pair<std::size_t, std::size_t> window(double x) const;

  std::vector<double> xs_;
  std::vector<double> prefix_; // prefix_[i] = sum of the first i sorted responses
  double h_;
};

double nw_estimate(const NWModel& model, double x);

/// Bias-variance balancing bandwidth
///   ((nQ / (L^2 + s^2)) + (nP / (L^2 + s^2))^((2b + eta) / (2b + alpha)))^(-1 / (2b + eta)),
/// eta = 1{alpha >= 1}, clamped to (0, 1].
double optimal_bandwidth(std::size_t nP, std::size_t nQ, double sigma, const HolderParams& holder, double alpha);

/// Whether sigma >= L and max(nP, nQ) >= 4 sigma^2, the regime the
/// bandwidth formula is tuned for.
bool bandwidth_regime_ok(std::size_t nP, std::size_t nQ, double sigma, const HolderParams& holder);

/// L^2 h^(2 beta) + (4 sigma^2 + |f|_inf^2) rho_h(mu_n, Q) / n.
double theorem1_rhs(double h, const HolderParams& holder, double f_sup, double sigma, std::size_t n, double rho_mu_q);

/// E[1{U+V>0} / (U+V)] for independent U ~ Bin(n, p), V ~ Bin(m, q), by
/// exact enumeration.
double expected_inverse_count(int n, double p, int m, double q);

struct MseConfig
{
  std::size_t trials = 50;
  std::size_t eval_points = 1000;
  std::uint64_t seed = 0;
  NoiseSampler noise; // empty: Gaussian(sigma)
};

struct MseResult
{
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<double> per_trial;
};

/// Squared L2(Q) error of one fitted model: exact at atoms of Q, Monte-Carlo
/// over `eval_points` fresh draws otherwise.
double squared_error_under_q(const NWModel& model,
                             const RegressionFunction& f,
                             const Distribution& Q,
                             std::size_t eval_points,
                             const CounterRng& stream);

MseResult mse_under_q(const SourceTargetPair& pair,
                      const RegressionFunction& f,
                      double sigma,
                      std::size_t nP,
                      std::size_t nQ,
                      double h,
                      const MseConfig& config,
                      unsigned threads = 1);

} // namespace covshift::regression
