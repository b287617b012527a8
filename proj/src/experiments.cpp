#include "covshift/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "covshift/instance.hpp"
#include "covshift/regression.hpp"
#include "covshift/similarity.hpp"

namespace covshift::experiments {

void RateSpec::validate() const
{
  holder.validate();
  if (n_grid.empty())
    throw std::domain_error("rate spec: empty n grid");
  if (trials == 0)
    throw std::domain_error("rate spec: trials must be positive");
  if (eval_points == 0)
    throw std::domain_error("rate spec: eval_points must be positive");
  if (!(sigma >= 0.0))
    throw std::domain_error("rate spec: sigma must be nonnegative");
  for (auto [nP, nQ] : n_grid) {
    if (nP + nQ == 0)
      throw std::domain_error("rate spec: grid point with nP + nQ = 0");
  }
  if (bandwidth.kind == BandwidthRule::Kind::fixed && !(bandwidth.h > 0.0))
    throw std::domain_error("rate spec: fixed bandwidth must be positive");
}

double declared_alpha(const SourceTargetPair& pair)
{
  if (!pair.family)
    throw std::domain_error("pair declares no family; give the bandwidth alpha explicitly");
  switch (pair.family->kind) {
    case FamilyKind::big:
    case FamilyKind::small:
    case FamilyKind::transfer:
      return pair.family->first;
    case FamilyKind::lr_bounded:
      return 1.0;
  }
  return 1.0;
}

RateTable run_rates(const RateSpec& spec, unsigned threads)
{
  spec.validate();
  const auto f = builtin_function(spec.f_name, spec.holder);
  double alpha = 1.0;
  if (spec.bandwidth.alpha)
    alpha = *spec.bandwidth.alpha;
  else if (spec.bandwidth.kind == BandwidthRule::Kind::corollary2)
    alpha = declared_alpha(spec.pair);

  RateTable table;
  table.rows.reserve(spec.n_grid.size());
  for (std::size_t g = 0; g < spec.n_grid.size(); ++g) {
    const auto [nP, nQ] = spec.n_grid[g];
    RateRow row;
    row.nP = nP;
    row.nQ = nQ;
    row.h = spec.bandwidth.kind == BandwidthRule::Kind::fixed
              ? spec.bandwidth.h
              : regression::optimal_bandwidth(nP, nQ, spec.sigma, spec.holder, alpha);
    row.regime_ok = regression::bandwidth_regime_ok(nP, nQ, spec.sigma, spec.holder);

    regression::MseConfig cfg;
    cfg.trials = spec.trials;
    cfg.eval_points = spec.eval_points;
    cfg.seed = derive_seed(spec.base_seed, g);
    const auto mse = regression::mse_under_q(spec.pair, f, spec.sigma, nP, nQ, row.h, cfg, threads);
    row.mse_mean = mse.mean;
    row.mse_stderr = mse.std_error;

    const auto mu = mixture_of_pair(spec.pair, nP, nQ);
    const auto rho = similarity::rho(mu, spec.pair.Q, row.h);
    row.bound_rhs = regression::theorem1_rhs(row.h, spec.holder, f.sup_norm, spec.sigma, nP + nQ, rho.value);
    table.rows.push_back(row);
  }
  return table;
}

double effective_sample_size(std::size_t nP, std::size_t nQ, double b)
{
  if (!(b >= 1.0))
    throw std::domain_error("effective_sample_size: b must be >= 1");
  return static_cast<double>(nP) / b + static_cast<double>(nQ);
}

SlopeFit fit_slope(const RateTable& table, Axis axis, double b, Window window)
{
  const std::size_t total = table.rows.size();
  const std::size_t first = window == Window::upper_half ? total / 2 : 0;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = first; i < total; ++i) {
    const auto& row = table.rows[i];
    const double n = axis == Axis::total_n ? static_cast<double>(row.nP + row.nQ)
                                           : effective_sample_size(row.nP, row.nQ, b);
    if (!(n > 0.0) || !(row.mse_mean > 0.0))
      throw std::domain_error("fit_slope: nonpositive n or mse");
    xs.push_back(std::log(n));
    ys.push_back(std::log(row.mse_mean));
  }
  if (xs.size() < 3)
    throw std::domain_error("fit_slope: need at least 3 rows");
  const double k = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 1e-12 * std::max(1.0, mx * mx))
    throw std::domain_error("fit_slope: degenerate (constant) n axis");
  SlopeFit fit;
  fit.points = xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

RateSpec spec_from_json(const nlohmann::json& j)
{
  try {
    RateSpec spec{.pair = pair_from_json(j.at("pair")),
                  .f_name = j.value("f", std::string("linear")),
                  .holder = {},
                  .n_grid = {},
                  .bandwidth = {}};
    spec.holder.beta = j.value("beta", 1.0);
    spec.holder.L = j.value("L", 1.0);
    spec.sigma = j.value("sigma", 1.0);
    spec.trials = j.value("trials", std::size_t{50});
    spec.eval_points = j.value("eval_points", std::size_t{1000});
    spec.base_seed = j.value("seed", std::uint64_t{0});
    const auto& grid = j.at("grid");
    if (grid.is_array()) {
      for (const auto& pt : grid)
        spec.n_grid.emplace_back(pt.at(0).get<std::size_t>(), pt.at(1).get<std::size_t>());
    } else {
      const auto nps = grid.at("n_p").get<std::vector<std::size_t>>();
      const auto nqs = grid.at("n_q").get<std::vector<std::size_t>>();
      if (nps.size() != nqs.size())
        throw config_error("rate spec: n_p and n_q lists differ in length");
      for (std::size_t i = 0; i < nps.size(); ++i)
        spec.n_grid.emplace_back(nps[i], nqs[i]);
    }
    if (j.contains("bandwidth")) {
      const auto& bw = j.at("bandwidth");
      const auto rule = bw.value("rule", std::string("corollary2"));
      if (rule == "corollary2") {
        spec.bandwidth.kind = BandwidthRule::Kind::corollary2;
        if (bw.contains("alpha"))
          spec.bandwidth.alpha = bw.at("alpha").get<double>();
      } else if (rule == "fixed") {
        spec.bandwidth.kind = BandwidthRule::Kind::fixed;
        spec.bandwidth.h = bw.at("h").get<double>();
      } else {
        throw config_error("rate spec: unknown bandwidth rule '" + rule + "'");
      }
    }
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("rate spec: ") + e.what());
  } catch (const std::domain_error& e) {
    throw config_error(std::string("rate spec: ") + e.what());
  }
}

void write_csv(const RateTable& table, std::ostream& out)
{
  out << "n_p,n_q,h,mse_mean,mse_stderr,bound_rhs\n";
  char buf[256];
  for (const auto& row : table.rows) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.12g,%.12g,%.12g,%.12g\n", row.nP, row.nQ, row.h, row.mse_mean,
                  row.mse_stderr, row.bound_rhs);
    out << buf;
  }
}

} // namespace covshift::experiments
