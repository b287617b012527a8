#include "covshift/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "covshift/quadrature.hpp"

namespace covshift {

namespace {

template<class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double piecewise_cdf(const PiecewiseConstantHard& pc, double x)
{
  if (x <= pc.edges.front())
    return 0.0;
  if (x >= pc.edges.back())
    return pc.cumulative.back();
  const auto it = std::upper_bound(pc.edges.begin(), pc.edges.end(), x);
  const auto i = static_cast<std::size_t>(std::distance(pc.edges.begin(), it)) - 1;
  return pc.cumulative[i] + pc.densities[i] * (x - pc.edges[i]);
}

// Mass of (a, b] summed cell by cell; differencing the cumulative table
// loses most digits when the interval sits in a low-density cell.
double piecewise_mass(const PiecewiseConstantHard& pc, double a, double b)
{
  a = std::max(a, pc.edges.front());
  b = std::min(b, pc.edges.back());
  if (!(b > a))
    return 0.0;
  auto i = static_cast<std::size_t>(std::distance(pc.edges.begin(), std::upper_bound(pc.edges.begin(), pc.edges.end(), a))) - 1;
  double total = 0.0;
  for (; i < pc.densities.size() && pc.edges[i] < b; ++i) {
    const double lo = std::max(a, pc.edges[i]);
    const double hi = std::min(b, pc.edges[i + 1]);
    if (hi > lo)
      total += pc.densities[i] * (hi - lo);
  }
  return total;
}

double piecewise_density(const PiecewiseConstantHard& pc, double x)
{
  // Cells are left-open, right-closed.
  if (x <= pc.edges.front() || x > pc.edges.back())
    return 0.0;
  const auto it = std::lower_bound(pc.edges.begin(), pc.edges.end(), x);
  const auto i = static_cast<std::size_t>(std::distance(pc.edges.begin(), it)) - 1;
  return pc.densities[i];
}

double piecewise_quantile(const PiecewiseConstantHard& pc, double u)
{
  const double total = pc.cumulative.back();
  const double target = u * total;
  // First cell whose upper cumulative mass reaches the target; zero-mass
  // cells are never selected.
  auto it = std::lower_bound(pc.cumulative.begin() + 1, pc.cumulative.end(), target);
  if (it == pc.cumulative.end())
    it = std::prev(pc.cumulative.end());
  auto i = static_cast<std::size_t>(std::distance(pc.cumulative.begin(), it)) - 1;
  while (pc.densities[i] <= 0.0 && i + 1 < pc.densities.size())
    ++i;
  const double x = pc.edges[i] + (target - pc.cumulative[i]) / pc.densities[i];
  return std::clamp(x, pc.edges[i], pc.edges[i + 1]);
}

void check_unit(double x, const char* what)
{
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error(std::string(what) + ": x must lie in [0, 1]");
}

} // namespace

double HardPairParams::center(int j) const
{
  return S * (2.0 * j - 1.0) / (2.0 * M);
}

Distribution Distribution::uniform(double a, double b)
{
  if (!(a >= 0.0 && b <= 1.0 && a < b))
    throw std::domain_error("Uniform: need 0 <= a < b <= 1");
  return Distribution(Uniform{a, b});
}

Distribution Distribution::power(double kappa)
{
  if (!(kappa >= 0.0))
    throw std::domain_error("PowerDensity: kappa must be nonnegative");
  return Distribution(PowerDensity{kappa});
}

Distribution Distribution::reverse_power(double alpha)
{
  if (!(alpha > 0.0))
    throw std::domain_error("ReversePower: alpha must be positive");
  return Distribution(ReversePower{alpha});
}

Distribution Distribution::point_mass(double location)
{
  check_unit(location, "PointMass");
  return Distribution(PointMass{location});
}

Distribution Distribution::hard(HardRole role, const HardPairParams& p)
{
  if (p.M < 1)
    throw std::domain_error("hard pair: M must be positive");
  const double shape = (p.epsilon / 3.0) * std::pow(p.r / p.S, p.alpha - 1.0);
  if (shape > 1.0)
    throw std::domain_error("hard pair: outer-band density of P would be negative");

  PiecewiseConstantHard pc;
  pc.role = role;
  pc.params = p;
  const auto cells = static_cast<std::size_t>(3 * p.M);
  pc.edges.resize(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k)
    pc.edges[k] = p.S * static_cast<double>(k) / static_cast<double>(cells);
  pc.edges.back() = p.S;

  const double Mr = static_cast<double>(p.M) * p.r;
  double outer = 0.0;
  double middle = 0.0;
  if (role == HardRole::source) {
    outer = (1.0 - shape) / (4.0 * Mr);
    middle = (p.epsilon / (6.0 * Mr)) * std::pow(p.r / p.S, p.alpha - 1.0);
  } else {
    outer = 0.0;
    middle = 1.0 / (2.0 * Mr);
  }
  pc.densities.resize(cells);
  for (std::size_t k = 0; k < cells; ++k)
    pc.densities[k] = (k % 3 == 1) ? middle : outer;

  pc.cumulative.resize(cells + 1);
  pc.cumulative[0] = 0.0;
  for (std::size_t k = 0; k < cells; ++k)
    pc.cumulative[k + 1] = pc.cumulative[k] + pc.densities[k] * (pc.edges[k + 1] - pc.edges[k]);
  return Distribution(std::move(pc));
}

Distribution Distribution::mixture(std::vector<MixtureComponent> components)
{
  if (components.empty())
    throw std::domain_error("Mixture: no components");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight >= 0.0))
      throw std::domain_error("Mixture: negative weight");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::domain_error("Mixture: weights must sum to 1");
  return Distribution(Mixture{std::move(components)});
}

std::string Distribution::describe() const
{
  std::ostringstream os;
  std::visit(overloaded{
               [&](const Uniform& u) { os << "Uniform(" << u.a << "," << u.b << ")"; },
               [&](const PowerDensity& p) { os << "PowerDensity(" << p.kappa << ")"; },
               [&](const ReversePower& p) { os << "ReversePower(" << p.alpha << ")"; },
               [&](const PiecewiseConstantHard& p) {
                 os << "Hard" << (p.role == HardRole::source ? "P" : "Q") << "(alpha=" << p.params.alpha
                    << ",C=" << p.params.C << ",M=" << p.params.M << ")";
               },
               [&](const PointMass& p) { os << "PointMass(" << p.location << ")"; },
               [&](const Mixture& m) {
                 os << "Mixture(";
                 for (std::size_t i = 0; i < m.components.size(); ++i)
                   os << (i ? "," : "") << m.components[i].weight << "*" << m.components[i].dist.describe();
                 os << ")";
               },
             },
             v_);
  return os.str();
}

double interval_mass(const Distribution& dist, double a, double b)
{
  a = std::max(a, 0.0);
  b = std::min(b, 1.0);
  if (b < a)
    return 0.0;
  return std::visit(
    overloaded{
      [&](const Uniform& u) {
        if (a <= u.a && b >= u.b)
          return 1.0;
        const double lo = std::max(a, u.a);
        const double hi = std::min(b, u.b);
        return hi > lo ? (hi - lo) / (u.b - u.a) : 0.0;
      },
      [&](const PowerDensity& p) {
        if (a <= 0.0 && b >= 1.0)
          return 1.0;
        return std::pow(b, p.kappa + 1.0) - std::pow(a, p.kappa + 1.0);
      },
      [&](const ReversePower& p) {
        if (a <= 0.0 && b >= 1.0)
          return 1.0;
        return std::pow(1.0 - a, p.alpha) - std::pow(1.0 - b, p.alpha);
      },
      [&](const PiecewiseConstantHard& pc) {
        if (a <= pc.edges.front() && b >= pc.edges.back())
          return 1.0;
        if (a <= pc.edges.front())
          return piecewise_cdf(pc, b);
        return piecewise_mass(pc, a, b);
      },
      [&](const PointMass& p) { return (p.location >= a && p.location <= b) ? 1.0 : 0.0; },
      [&](const Mixture& m) {
        double total = 0.0;
        bool all_full = true;
        for (const auto& c : m.components) {
          const double part = interval_mass(c.dist, a, b);
          all_full = all_full && part == 1.0;
          total += c.weight * part;
        }
        return all_full ? 1.0 : total;
      },
    },
    dist.variant());
}

namespace {

double ball_prob_unchecked(const Distribution& dist, double x, double h)
{
  if (const auto* pm = dist.get_if<PointMass>())
    return std::abs(x - pm->location) <= h ? 1.0 : 0.0;
  if (const auto* mix = dist.get_if<Mixture>()) {
    double total = 0.0;
    bool all_full = true;
    for (const auto& c : mix->components) {
      const double part = ball_prob_unchecked(c.dist, x, h);
      all_full = all_full && part == 1.0;
      total += c.weight * part;
    }
    return all_full ? 1.0 : total;
  }
  return interval_mass(dist, x - h, x + h);
}

} // namespace

double ball_prob(const Distribution& dist, double x, double h)
{
  check_unit(x, "ball_prob");
  if (!(h > 0.0))
    throw std::domain_error("ball_prob: h must be positive");
  return ball_prob_unchecked(dist, x, h);
}

double cdf(const Distribution& dist, double x)
{
  if (x < 0.0)
    return 0.0;
  return interval_mass(dist, 0.0, x);
}

double density(const Distribution& dist, double x)
{
  return std::visit(overloaded{
                      [&](const Uniform& u) { return (x >= u.a && x <= u.b) ? 1.0 / (u.b - u.a) : 0.0; },
                      [&](const PowerDensity& p) {
                        return (x >= 0.0 && x <= 1.0) ? (p.kappa + 1.0) * std::pow(x, p.kappa) : 0.0;
                      },
                      [&](const ReversePower& p) {
                        return (x >= 0.0 && x <= 1.0) ? p.alpha * std::pow(1.0 - x, p.alpha - 1.0) : 0.0;
                      },
                      [&](const PiecewiseConstantHard& pc) { return piecewise_density(pc, x); },
                      [&](const PointMass&) -> double {
                        throw unsupported_operation("density: PointMass has no Lebesgue density");
                      },
                      [&](const Mixture& m) {
                        double total = 0.0;
                        for (const auto& c : m.components)
                          total += c.weight * density(c.dist, x);
                        return total;
                      },
                    },
                    dist.variant());
}

bool has_density(const Distribution& dist)
{
  if (dist.get_if<PointMass>())
    return false;
  if (const auto* mix = dist.get_if<Mixture>()) {
    return std::all_of(mix->components.begin(), mix->components.end(), [](const auto& c) {
      return c.weight == 0.0 || has_density(c.dist);
    });
  }
  return true;
}

std::vector<std::pair<double, double>> atoms(const Distribution& dist)
{
  std::vector<std::pair<double, double>> out;
  if (const auto* pm = dist.get_if<PointMass>()) {
    out.emplace_back(pm->location, 1.0);
  } else if (const auto* mix = dist.get_if<Mixture>()) {
    for (const auto& c : mix->components) {
      for (auto [loc, w] : atoms(c.dist))
        out.emplace_back(loc, w * c.weight);
    }
  }
  return out;
}

std::vector<double> breakpoints(const Distribution& dist)
{
  return std::visit(overloaded{
                      [](const Uniform& u) { return std::vector<double>{u.a, u.b}; },
                      [](const PowerDensity&) { return std::vector<double>{0.0, 1.0}; },
                      [](const ReversePower&) { return std::vector<double>{0.0, 1.0}; },
                      [](const PiecewiseConstantHard& pc) { return pc.edges; },
                      [](const PointMass& p) { return std::vector<double>{p.location}; },
                      [](const Mixture& m) {
                        std::vector<double> out;
                        for (const auto& c : m.components) {
                          auto b = breakpoints(c.dist);
                          out.insert(out.end(), b.begin(), b.end());
                        }
                        std::sort(out.begin(), out.end());
                        out.erase(std::unique(out.begin(), out.end()), out.end());
                        return out;
                      },
                    },
                    dist.variant());
}

std::pair<double, double> support(const Distribution& dist)
{
  return std::visit(overloaded{
                      [](const Uniform& u) { return std::pair{u.a, u.b}; },
                      [](const PowerDensity&) { return std::pair{0.0, 1.0}; },
                      [](const ReversePower&) { return std::pair{0.0, 1.0}; },
                      [](const PiecewiseConstantHard& pc) {
                        // First and last cells carrying mass.
                        std::size_t lo = 0;
                        while (lo < pc.densities.size() && pc.densities[lo] <= 0.0)
                          ++lo;
                        std::size_t hi = pc.densities.size();
                        while (hi > lo && pc.densities[hi - 1] <= 0.0)
                          --hi;
                        return std::pair{pc.edges[lo], pc.edges[hi]};
                      },
                      [](const PointMass& p) { return std::pair{p.location, p.location}; },
                      [](const Mixture& m) {
                        double lo = 1.0;
                        double hi = 0.0;
                        for (const auto& c : m.components) {
                          if (c.weight <= 0.0)
                            continue;
                          auto [a, b] = support(c.dist);
                          lo = std::min(lo, a);
                          hi = std::max(hi, b);
                        }
                        return std::pair{lo, hi};
                      },
                    },
                    dist.variant());
}

double draw(const Distribution& dist, const CounterRng& rng, std::uint64_t index)
{
  const double u = rng.uniform(index);
  return std::visit(overloaded{
                      [&](const Uniform& d) { return d.a + u * (d.b - d.a); },
                      [&](const PowerDensity& d) { return std::pow(u, 1.0 / (d.kappa + 1.0)); },
                      [&](const ReversePower& d) { return -std::expm1(std::log1p(-u) / d.alpha); },
                      [&](const PiecewiseConstantHard& pc) { return piecewise_quantile(pc, u); },
                      [&](const PointMass& p) { return p.location; },
                      [&](const Mixture& m) {
                        double acc = 0.0;
                        std::size_t k = 0;
                        for (; k + 1 < m.components.size(); ++k) {
                          acc += m.components[k].weight;
                          if (u <= acc)
                            break;
                        }
                        return draw(m.components[k].dist, rng.substream(k + 1), index);
                      },
                    },
                    dist.variant());
}

std::vector<double> sample(const Distribution& dist, std::size_t n, std::uint64_t seed)
{
  const CounterRng rng(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = draw(dist, rng, i);
  return out;
}

double integrate_against(const Distribution& dist,
                         const std::function<double(double)>& g,
                         std::span<const double> extra_breaks,
                         double abs_tol)
{
  if (const auto* pm = dist.get_if<PointMass>())
    return g(pm->location);
  if (const auto* mix = dist.get_if<Mixture>()) {
    double total = 0.0;
    for (const auto& c : mix->components) {
      if (c.weight > 0.0)
        total += c.weight * integrate_against(c.dist, g, extra_breaks, abs_tol);
    }
    return total;
  }
  if (const auto* rp = dist.get_if<ReversePower>()) {
    // Integrate in u = (1 - x)^alpha, where the law is uniform; this removes
    // the endpoint singularity of the density when alpha < 1.
    const double a = rp->alpha;
    std::vector<double> ubreaks;
    for (double b : extra_breaks) {
      if (b > 0.0 && b < 1.0)
        ubreaks.push_back(std::pow(1.0 - b, a));
    }
    return integrate_piecewise([&](double u) { return g(std::max(0.0, 1.0 - std::pow(u, 1.0 / a))); }, 0.0, 1.0,
                               ubreaks, abs_tol)
      .value;
  }
  const auto [lo, hi] = support(dist);
  auto own = breakpoints(dist);
  own.insert(own.end(), extra_breaks.begin(), extra_breaks.end());
  const auto knots = clip_breakpoints(own, lo, hi);
  const double piece_tol = abs_tol / static_cast<double>(std::max<std::size_t>(knots.size() - 1, 1));
  double total = 0.0;
  double comp = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i];
    const double b = knots[i + 1];
    if (!(b > a) || density(dist, 0.5 * (a + b)) <= 0.0)
      continue;
    const auto piece = integrate([&](double x) { return g(x) * density(dist, x); }, a, b, piece_tol);
    const double t = total + piece.value;
    comp += std::abs(total) >= std::abs(piece.value) ? (total - t) + piece.value : (piece.value - t) + total;
    total = t;
  }
  return total + comp;
}

void FamilyDecl::validate() const
{
  switch (kind) {
    case FamilyKind::big:
    case FamilyKind::small:
      if (!(first > 0.0))
        throw std::domain_error("family: alpha must be positive");
      if (!second || !(*second >= 1.0))
        throw std::domain_error("family: C must be >= 1");
      break;
    case FamilyKind::transfer:
      if (!(first >= 0.0))
        throw std::domain_error("family: gamma must be nonnegative");
      if (second && !(*second > 0.0 && *second <= 1.0))
        throw std::domain_error("family: K must lie in (0, 1]");
      break;
    case FamilyKind::lr_bounded:
      if (!(first >= 1.0))
        throw std::domain_error("family: b must be >= 1");
      break;
  }
}

std::string to_string(FamilyKind kind)
{
  switch (kind) {
    case FamilyKind::big:
      return "big";
    case FamilyKind::small:
      return "small";
    case FamilyKind::transfer:
      return "transfer";
    case FamilyKind::lr_bounded:
      return "lr_bounded";
  }
  return "?";
}

const HardPairParams* SourceTargetPair::hard_params() const
{
  if (const auto* pc = P.get_if<PiecewiseConstantHard>())
    return &pc->params;
  return nullptr;
}

Distribution mixture_of_pair(const SourceTargetPair& pair, std::size_t nP, std::size_t nQ)
{
  const std::size_t n = nP + nQ;
  if (n == 0)
    throw std::domain_error("mixture_of_pair: nP + nQ must be positive");
  if (nP == 0)
    return pair.Q;
  if (nQ == 0)
    return pair.P;
  const double wP = static_cast<double>(nP) / static_cast<double>(n);
  return Distribution::mixture({{wP, pair.P}, {1.0 - wP, pair.Q}});
}

HardPairParams hard_pair_params(double alpha, double C, int M)
{
  if (!(alpha >= 1.0))
    throw std::domain_error("hard_pair_big: alpha must be >= 1");
  if (!(C >= 1.0))
    throw std::domain_error("hard_pair_big: C must be >= 1");
  if (M < 1)
    throw std::domain_error("hard_pair_big: M must be positive");
  HardPairParams p;
  p.alpha = alpha;
  p.C = C;
  p.M = M;
  if (C > 6.0) {
    p.epsilon = 6.0 / C;
    p.S = 0.25;
  } else {
    p.epsilon = 1.0;
    p.S = 0.25 * std::pow(C / 6.0, 1.0 / alpha);
  }
  p.r = p.S / (6.0 * M);
  return p;
}

SourceTargetPair hard_pair_big(double alpha, double C, int M)
{
  const auto p = hard_pair_params(alpha, C, M);
  return SourceTargetPair{Distribution::hard(HardRole::source, p),
                          Distribution::hard(HardRole::target, p),
                          FamilyDecl{FamilyKind::big, alpha, C}};
}

SourceTargetPair hard_pair_small(double alpha)
{
  if (!(alpha > 0.0))
    throw std::domain_error("hard_pair_small: alpha must be positive");
  return SourceTargetPair{Distribution::reverse_power(alpha), Distribution::point_mass(1.0),
                          FamilyDecl{FamilyKind::small, alpha, 1.0}};
}

SourceTargetPair power_pair(double kappa)
{
  if (!(kappa >= 1.0))
    throw std::domain_error("power_pair: kappa must be >= 1");
  return SourceTargetPair{Distribution::power(kappa), Distribution::uniform(0.0, 1.0),
                          FamilyDecl{FamilyKind::transfer, kappa, std::nullopt}};
}

} // namespace covshift
