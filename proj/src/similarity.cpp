#include "covshift/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "covshift/geometry.hpp"
#include "covshift/quadrature.hpp"

namespace covshift::similarity {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::vector<double> shifted_breaks(const Distribution& P, double h)
{
  auto base = breakpoints(P);
  base.push_back(0.0);
  base.push_back(1.0);
  std::vector<double> out;
  out.reserve(2 * base.size());
  for (double b : base) {
    out.push_back(b - h);
    out.push_back(b + h);
  }
  return out;
}

bool all_atoms(const Distribution& Q)
{
  if (Q.get_if<PointMass>())
    return true;
  if (const auto* mix = Q.get_if<Mixture>()) {
    return std::all_of(mix->components.begin(), mix->components.end(), [](const auto& c) {
      return c.weight == 0.0 || all_atoms(c.dist);
    });
  }
  return false;
}

RhoEstimate closed_form(const Distribution& P, const Distribution& Q, double h)
{
  RhoEstimate est;
  est.method = Method::closed_form;
  est.h = h;
  if (h >= 1.0) {
    est.value = 1.0;
    return est;
  }
  double total = 0.0;
  for (auto [loc, w] : atoms(Q)) {
    if (w == 0.0)
      continue;
    const double p = ball_prob(P, loc, h);
    if (p <= 0.0) {
      est.value = inf;
      est.witness = loc;
      return est;
    }
    total += w / p;
  }
  est.value = total;
  return est;
}

// Finds a Q-charged point where P(B(x,h)) vanishes, if any.
std::optional<double> zero_witness(const Distribution& P, const Distribution& Q, double h, std::span<const double> knots)
{
  for (auto [loc, w] : atoms(Q)) {
    if (w > 0.0 && ball_prob(P, loc, h) <= 0.0)
      return loc;
  }
  if (!has_density(Q) && atoms(Q).size() > 0 && all_atoms(Q))
    return std::nullopt;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i];
    const double b = knots[i + 1];
    if (!(b > a))
      continue;
    const double mid = 0.5 * (a + b);
    double q_mid = 0.0;
    try {
      q_mid = density(Q, mid);
    } catch (const unsupported_operation&) {
      // Q mixes atoms and a density; use the absolutely continuous part.
      q_mid = interval_mass(Q, a, b) > 0.0 ? 1.0 : 0.0;
    }
    if (q_mid <= 0.0)
      continue;
    if (ball_prob(P, mid, h) <= 0.0)
      return mid;
    // A zero at the closure of a Q-charged piece makes 1/P(B) non-integrable.
    if (ball_prob(P, a, h) <= 0.0)
      return a;
    if (ball_prob(P, b, h) <= 0.0)
      return b;
  }
  return std::nullopt;
}

RhoEstimate by_quadrature(const Distribution& P, const Distribution& Q, double h, double abs_tol)
{
  RhoEstimate est;
  est.method = Method::quadrature;
  est.h = h;
  if (h >= 1.0) {
    est.value = 1.0;
    return est;
  }
  auto breaks = shifted_breaks(P, h);
  auto q_breaks = breakpoints(Q);
  std::vector<double> all = breaks;
  all.insert(all.end(), q_breaks.begin(), q_breaks.end());
  const auto [lo, hi] = support(Q);
  const auto knots = clip_breakpoints(all, lo, hi);
  if (auto w = zero_witness(P, Q, h, knots)) {
    est.value = inf;
    est.witness = *w;
    return est;
  }
  est.value = integrate_against(Q, [&](double x) { return 1.0 / ball_prob(P, std::clamp(x, 0.0, 1.0), h); }, breaks, abs_tol);
  return est;
}

RhoEstimate by_monte_carlo(const Distribution& P,
                           const Distribution& Q,
                           double h,
                           std::size_t m,
                           std::uint64_t seed)
{
  if (m == 0)
    throw std::domain_error("rho: mc_samples must be positive");
  RhoEstimate est;
  est.method = Method::monte_carlo;
  est.h = h;
  const CounterRng rng(seed);
  // Welford running moments.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double x = draw(Q, rng, j);
    const double p = ball_prob(P, x, h);
    if (p <= 0.0) {
      est.value = inf;
      est.witness = x;
      return est;
    }
    const double v = 1.0 / p;
    const double delta = v - mean;
    mean += delta / static_cast<double>(j + 1);
    m2 += delta * (v - mean);
  }
  est.value = mean;
  est.std_error = m > 1 ? std::sqrt(m2 / static_cast<double>(m - 1) / static_cast<double>(m)) : 0.0;
  return est;
}

double family_statistic(const SourceTargetPair& pair, double alpha, double h, std::optional<double>& witness)
{
  const auto r = rho(pair.P, pair.Q, h);
  if (std::isinf(r.value)) {
    witness = r.witness;
    return inf;
  }
  return std::pow(h, alpha) * r.value;
}

// Golden-section search for the max of f on [a, b].
template<class F>
std::pair<double, double> golden_max(F&& f, double a, double b, int iterations = 60)
{
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iterations && (b - a) > 1e-12 * b; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

} // namespace

std::string to_string(Method m)
{
  switch (m) {
    case Method::automatic:
      return "auto";
    case Method::closed_form:
      return "closed-form";
    case Method::quadrature:
      return "quadrature";
    case Method::monte_carlo:
      return "monte-carlo";
  }
  return "?";
}

Method method_from_string(const std::string& s)
{
  if (s == "auto")
    return Method::automatic;
  if (s == "closed" || s == "closed-form")
    return Method::closed_form;
  if (s == "quad" || s == "quadrature")
    return Method::quadrature;
  if (s == "mc" || s == "monte-carlo")
    return Method::monte_carlo;
  throw std::invalid_argument("unknown method '" + s + "'");
}

bool has_closed_form(const Distribution& Q, double h)
{
  return h >= 1.0 || all_atoms(Q);
}

RhoEstimate rho(const Distribution& P, const Distribution& Q, double h, const RhoOptions& options)
{
  if (!(h > 0.0))
    throw std::domain_error("rho: h must be positive");
  switch (options.method) {
    case Method::automatic:
      return has_closed_form(Q, h) ? closed_form(P, Q, h) : by_quadrature(P, Q, h, options.abs_tol);
    case Method::closed_form:
      if (!has_closed_form(Q, h))
        throw unsupported_operation("rho: no closed form for this target at this scale");
      return closed_form(P, Q, h);
    case Method::quadrature:
      return by_quadrature(P, Q, h, options.abs_tol);
    case Method::monte_carlo:
      return by_monte_carlo(P, Q, h, options.mc_samples, options.seed);
  }
  return {};
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t n)
{
  if (!(lo > 0.0 && hi >= lo) || n == 0)
    throw std::domain_error("geometric_grid: need 0 < lo <= hi and n >= 1");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = hi;
    return out;
  }
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = lo * std::exp(step * static_cast<double>(i));
  out.back() = hi;
  return out;
}

std::vector<double> default_h_grid()
{
  return geometric_grid(1e-3, 1.0, 200);
}

FamilyReport verify_family(const SourceTargetPair& pair,
                           const FamilyDecl& family,
                           std::span<const double> h_grid,
                           double rel_tol)
{
  if (family.kind != FamilyKind::big && family.kind != FamilyKind::small)
    throw std::domain_error("verify_family: only the big and small alpha-families are supported");
  if (h_grid.empty())
    throw std::domain_error("verify_family: empty grid");
  for (double h : h_grid) {
    if (!(h > 0.0 && h <= 1.0))
      throw std::domain_error("verify_family: grid points must lie in (0, 1]");
  }
  FamilyReport rep;
  rep.family = family.kind;
  rep.alpha = family.first;
  rep.C = family.second.value_or(1.0);
  rep.grid.assign(h_grid.begin(), h_grid.end());
  std::sort(rep.grid.begin(), rep.grid.end());
  rep.grid_ratio = rep.grid.size() > 1 ? rep.grid[1] / rep.grid[0] : 1.0;
  if (!(family.first > 0.0))
    throw std::domain_error("verify_family: alpha must be positive");

  std::vector<double> stats(rep.grid.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < rep.grid.size(); ++i) {
    stats[i] = family_statistic(pair, rep.alpha, rep.grid[i], rep.witness);
    if (std::isinf(stats[i])) {
      rep.sup_statistic = inf;
      rep.worst_h = rep.grid[i];
      rep.member = false;
      return rep;
    }
    if (stats[i] > stats[best])
      best = i;
  }
  rep.sup_statistic = stats[best];
  rep.worst_h = rep.grid[best];
  if (rep.grid.size() > 1) {
    const double a = rep.grid[best == 0 ? 0 : best - 1];
    const double b = rep.grid[std::min(best + 1, rep.grid.size() - 1)];
    std::optional<double> unused;
    auto [h_star, value] = golden_max([&](double h) { return family_statistic(pair, rep.alpha, h, unused); }, a, b);
    if (value > rep.sup_statistic) {
      rep.sup_statistic = value;
      rep.worst_h = h_star;
    }
  }

  bool ok = rep.sup_statistic <= rep.C * (1.0 + rel_tol);
  if (family.kind == FamilyKind::small) {
    for (double h : rep.grid) {
      const auto r = rho(pair.Q, pair.Q, h);
      rep.self_sup = std::max(rep.self_sup, r.value);
    }
    ok = ok && rep.self_sup <= rep.C * (1.0 + rel_tol);
  }
  rep.member = ok;
  return rep;
}

BallRatio min_ball_ratio(const Distribution& P, const Distribution& Q, double h, std::span<const double> x_grid)
{
  BallRatio out;
  out.lambda = inf;
  for (double x : x_grid) {
    const double q = ball_prob(Q, x, h);
    if (q <= 0.0)
      continue;
    out.lambda = std::min(out.lambda, ball_prob(P, x, h) / q);
  }
  if (std::isinf(out.lambda)) {
    // Every grid point was vacuous.
    out.lambda = 0.0;
  }
  const double cover = static_cast<double>(geometry::covering_number_interval(h / 2.0));
  out.covering_bound = out.lambda > 0.0 ? cover / out.lambda : inf;
  return out;
}

TransferReport transfer_exponent_holds(const SourceTargetPair& pair,
                                       double gamma,
                                       double K,
                                       std::span<const double> h_grid,
                                       std::span<const double> x_grid)
{
  if (h_grid.empty() || x_grid.empty())
    throw std::domain_error("transfer_exponent_holds: empty grid");
  TransferReport rep;
  double min_ratio = inf;
  for (double h : h_grid) {
    const double scale = std::pow(h, gamma);
    for (double x : x_grid) {
      const double q = ball_prob(pair.Q, x, h);
      if (q <= 0.0)
        continue;
      const double ratio = ball_prob(pair.P, x, h) / (scale * q);
      if (ratio < min_ratio) {
        min_ratio = ratio;
        rep.worst_x = x;
        rep.worst_h = h;
      }
    }
  }
  rep.worst_ratio = min_ratio;
  rep.fitted_K = std::min(min_ratio, 1.0);
  rep.holds = min_ratio >= K * (1.0 - 1e-12);
  return rep;
}

Lemma4Report lemma4_check(const SourceTargetPair& pair, double gamma, double K, std::span<const double> h_grid)
{
  if (!(K > 0.0 && K <= 1.0))
    throw std::domain_error("lemma4_check: K must lie in (0, 1]");
  Lemma4Report rep;
  rep.bound = 2.0 / K;
  for (double h : h_grid) {
    const auto r = rho(pair.P, pair.Q, h);
    const double stat = std::pow(h, gamma + 1.0) * r.value;
    if (stat > rep.sup_statistic) {
      rep.sup_statistic = stat;
      rep.worst_h = h;
    }
  }
  rep.holds = rep.sup_statistic <= rep.bound;
  return rep;
}

} // namespace covshift::similarity
