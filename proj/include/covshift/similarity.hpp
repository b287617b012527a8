#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covshift/distributions.hpp"

namespace covshift::similarity {

enum class Method
{
  automatic,
  closed_form,
  quadrature,
  monte_carlo,
};

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct RhoEstimate
{
  double value = 0.0; // +infinity when P(B(x,h)) = 0 on a Q-positive set
  Method method = Method::closed_form;
  double std_error = 0.0;
  double h = 0.0;
  std::optional<double> witness; // a point x with P(B(x,h)) = 0, if infinite
};

struct RhoOptions
{
  Method method = Method::automatic;
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 0;
  double abs_tol = 1e-9;
};

/// True when rho(P, Q, h) has an exact evaluation: h >= 1, or Q is a
/// point mass or a mixture of point masses.
bool has_closed_form(const Distribution& Q, double h);

/// rho_h(P, Q) = integral of 1 / P(B(x, h)) dQ(x).
RhoEstimate rho(const Distribution& P, const Distribution& Q, double h, const RhoOptions& options = {});

std::vector<double> geometric_grid(double lo, double hi, std::size_t n);

// Default grid for sup over h in (0, 1]: 200 geometric points in [1e-3, 1].
std::vector<double> default_h_grid();

struct FamilyReport
{
  FamilyKind family = FamilyKind::big;
  double alpha = 0.0;
  double C = 0.0;
  std::vector<double> grid;
  double grid_ratio = 0.0;     // spacing of the geometric grid (h_{i+1} / h_i)
  double sup_statistic = 0.0;  // sup of h^alpha rho_h(P, Q), refined around the argmax
  double self_sup = 0.0;       // sup of rho_h(Q, Q) (small family only)
  double worst_h = 0.0;
  bool member = false;
  std::optional<double> witness;
};

/// Grid certificate for membership in the big or small alpha-family.
FamilyReport verify_family(const SourceTargetPair& pair,
                           const FamilyDecl& family,
                           std::span<const double> h_grid,
                           double rel_tol = 1e-8);

struct BallRatio
{
  double lambda = 0.0;
  double covering_bound = 0.0;
};

/// lambda = min over x_grid of P(B(x,h)) / Q(B(x,h)) and the resulting
/// N(h/2) / lambda bound on rho_h(P, Q). Points with Q(B) = 0 are skipped.
BallRatio min_ball_ratio(const Distribution& P,
                         const Distribution& Q,
                         double h,
                         std::span<const double> x_grid);

struct TransferReport
{
  bool holds = false;
  double fitted_K = 0.0; // largest K in (0, 1] that works on the grid
  double worst_x = 0.0;
  double worst_h = 0.0;
  double worst_ratio = 0.0; // P(B) / (h^gamma Q(B)) at the witness
};

TransferReport transfer_exponent_holds(const SourceTargetPair& pair,
                                       double gamma,
                                       double K,
                                       std::span<const double> h_grid,
                                       std::span<const double> x_grid);

struct Lemma4Report
{
  bool holds = false;
  double sup_statistic = 0.0; // sup of h^(gamma + 1) rho_h
  double bound = 0.0;         // 2 / K
  double worst_h = 0.0;
};

Lemma4Report lemma4_check(const SourceTargetPair& pair, double gamma, double K, std::span<const double> h_grid);

} // namespace covshift::similarity
