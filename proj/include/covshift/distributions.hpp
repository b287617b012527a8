#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "covshift/rng.hpp"

namespace covshift {

// Thrown for operations a variant does not support (e.g. the density of an atom).
class unsupported_operation : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

struct Uniform
{
  double a = 0.0;
  double b = 1.0;
};

// Density (kappa + 1) x^kappa on [0, 1].
struct PowerDensity
{
  double kappa = 0.0;
};

// Density alpha (1 - x)^(alpha - 1) on [0, 1]; puts mass h^alpha on B(1, h).
struct ReversePower
{
  double alpha = 1.0;
};

struct HardPairParams
{
  double alpha = 1.0;
  double C = 1.0;
  double epsilon = 1.0;
  double S = 1.0;
  int M = 1;
  double r = 1.0; // S / (6 M)

  // Center of the j-th interval, j = 1..M.
  double center(int j) const;
};

enum class HardRole
{
  source,
  target,
};

// Piecewise-constant member of the lower-bound pair. Cells are
// (edges[i], edges[i+1]] with density densities[i]; all mass sits in (0, S].
struct PiecewiseConstantHard
{
  HardRole role = HardRole::source;
  HardPairParams params;
  std::vector<double> edges;
  std::vector<double> densities;
  std::vector<double> cumulative; // mass of (edges[0], edges[i]]
};

struct PointMass
{
  double location = 1.0;
};

struct MixtureComponent;

struct Mixture
{
  std::vector<MixtureComponent> components;
};

class Distribution
{
public:
  using Variant = std::variant<Uniform, PowerDensity, ReversePower, PiecewiseConstantHard, PointMass, Mixture>;

  static Distribution uniform(double a = 0.0, double b = 1.0);
  static Distribution power(double kappa);
  static Distribution reverse_power(double alpha);
  static Distribution point_mass(double location);
  static Distribution hard(HardRole role, const HardPairParams& params);
  static Distribution mixture(std::vector<MixtureComponent> components);

  const Variant& variant() const { return v_; }

  template<class T>
  const T* get_if() const
  {
    return std::get_if<T>(&v_);
  }

  std::string describe() const;

private:
  explicit Distribution(Variant v) : v_(std::move(v)) {}

  Variant v_;
};

struct MixtureComponent
{
  double weight = 0.0;
  Distribution dist;
};

/// Measure of the closed interval [a, b] (clipped to [0, 1]).
double interval_mass(const Distribution& dist, double a, double b);

/// Exact P(B(x, h)) = P([x - h, x + h] cap [0, 1]). x must lie in [0, 1].
double ball_prob(const Distribution& dist, double x, double h);

double cdf(const Distribution& dist, double x);

/// Lebesgue density; 0 outside [0, 1]. Throws unsupported_operation when the
/// law has an atom.
double density(const Distribution& dist, double x);

bool has_density(const Distribution& dist);

/// Atoms as (location, mass), flattened through mixtures.
std::vector<std::pair<double, double>> atoms(const Distribution& dist);

/// Points where the density (or the CDF slope) may jump, including support
/// ends and atom locations.
std::vector<double> breakpoints(const Distribution& dist);

/// Smallest closed interval carrying all the mass.
std::pair<double, double> support(const Distribution& dist);

/// Single inverse-CDF draw keyed by (rng, index).
double draw(const Distribution& dist, const CounterRng& rng, std::uint64_t index);

/// n i.i.d. draws; deterministic in seed.
std::vector<double> sample(const Distribution& dist, std::size_t n, std::uint64_t seed);

/// Integral of g against dist. Absolutely continuous parts use piecewise
/// adaptive quadrature split at the law's breakpoints plus `extra_breaks`;
/// atoms are evaluated exactly.
double integrate_against(const Distribution& dist,
                         const std::function<double(double)>& g,
                         std::span<const double> extra_breaks = {},
                         double abs_tol = 1e-11);

enum class FamilyKind
{
  big,
  small,
  transfer,
  lr_bounded,
};

// Declared family: big/small(alpha, C), transfer(gamma, K), lr_bounded(b).
// `second` is empty for transfer pairs whose K is still to be fitted and
// for lr_bounded.
struct FamilyDecl
{
  FamilyKind kind = FamilyKind::big;
  double first = 1.0;
  std::optional<double> second;

  void validate() const;
};

std::string to_string(FamilyKind kind);

struct SourceTargetPair
{
  Distribution P;
  Distribution Q;
  std::optional<FamilyDecl> family;

  // Non-null when P is the source half of a lower-bound pair.
  const HardPairParams* hard_params() const;
};

/// mu_n = (nP / n) P + (nQ / n) Q.
Distribution mixture_of_pair(const SourceTargetPair& pair, std::size_t nP, std::size_t nQ);

/// Table-style packing pair with epsilon, S chosen from (alpha, C) and
/// r = S / (6 M).
SourceTargetPair hard_pair_big(double alpha, double C, int M);

/// Parameters hard_pair_big would use, without building the densities.
HardPairParams hard_pair_params(double alpha, double C, int M);

/// (ReversePower(alpha), PointMass(1)).
SourceTargetPair hard_pair_small(double alpha);

/// (PowerDensity(kappa), Uniform(0, 1)).
SourceTargetPair power_pair(double kappa);

} // namespace covshift
