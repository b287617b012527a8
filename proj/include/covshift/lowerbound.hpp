#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "covshift/distributions.hpp"
#include "covshift/functions.hpp"

namespace covshift::lowerbound {

/// exp(-1 / (1 - x^2)) on |x| < 1, zero elsewhere.
double bump(double x);

/// Integral of bump^2 over [-1, 1] (computed once by quadrature).
double c_psi_sq();

struct PackingParams
{
  int M = 8;
  double r = 0.0;
  HolderParams holder;
  double S = 1.0;

  static PackingParams from_hard(const HardPairParams& hard, const HolderParams& holder);

  double center(int j) const { return (6.0 * j - 3.0) * r; }
  void validate() const;
};

// Binary words of length M <= 64 stored as bit masks (bit j-1 is b_j).
struct BinaryCode
{
  int M = 0;
  std::vector<std::uint64_t> words;

  std::size_t size() const { return words.size(); }
  int min_distance() const;
  static bool bit(std::uint64_t word, int j) { return (word >> (j - 1)) & 1u; }
};

int hamming(std::uint64_t a, std::uint64_t b);

/// Greedy Gilbert-Varshamov code: scans {0,1}^M in a fixed pseudorandom
/// order and keeps words at Hamming distance >= M/8 from all kept ones,
/// stopping at 2^(M/8) words. M must be a multiple of 8 in [8, 64].
BinaryCode gv_code(int M);

/// f_b(x) = sum_j b_j L r^beta bump((x - z_j) / r).
RegressionFunction packing_function(std::uint64_t word, const PackingParams& params);

/// f_t(x) = L (x - t)_+^beta.
RegressionFunction two_point_function(double t, const HolderParams& holder);

/// Squared L2(mu) distance between f and g by quadrature (atoms exact).
double squared_distance(const RegressionFunction& f, const RegressionFunction& g, const Distribution& mu);

/// KL divergence between the Gaussian-noise laws of the sample under f and g:
/// (nP |f - g|^2_P + nQ |f - g|^2_Q) / (2 sigma^2).
double kl_divergence(const RegressionFunction& f,
                     const RegressionFunction& g,
                     const SourceTargetPair& pair,
                     std::size_t nP,
                     std::size_t nQ,
                     double sigma);

/// Packing radius making the pairwise KL of the packing class at most M/32.
double calibrate_fano_radius(double alpha,
                             double C,
                             const HolderParams& holder,
                             double sigma,
                             std::size_t nP,
                             std::size_t nQ);

/// Two-point offset t with 1 - t = ((L^2 nP / 2s^2)^(1/(2b+alpha)) + (L^2 nQ / 2s^2)^(1/(2b)))^-1,
/// clamped into [0, 1].
double calibrate_lecam_offset(double alpha, const HolderParams& holder, double sigma, std::size_t nP, std::size_t nQ);

struct HolderCertificate
{
  bool pass = false;
  double max_ratio = 0.0; // max |f(x) - f(y)| / (L |x - y|^beta)
  double worst_x = 0.0;
  double worst_y = 0.0;
  std::size_t pairs_checked = 0;
};

/// Tests the Hoelder inequality on random pairs plus adjacent grid points,
/// kinks, and the interval ends. Also requires f(0) = 0.
HolderCertificate holder_certificate(const RegressionFunction& f,
                                     const HolderParams& holder,
                                     std::size_t num_pairs,
                                     std::uint64_t seed);

struct FanoReport
{
  double r_calibrated = 0.0;
  double M_implied = 0.0; // S / (6 r_calibrated)
  int M = 0;
  double r_used = 0.0;    // S / (6 M), the radius of the constructed pair
  double S = 0.0;
  bool radius_consistent = false; // r_used <= r_calibrated
  bool m_at_least_32 = false;
  double sample_threshold = 0.0;  // (72 s^2 C / (L^2 4^alpha))^(2 beta + alpha)
  bool sample_size_ok = false;
  std::size_t code_size = 0;
  int min_distance = 0;
  double max_kl = 0.0;
  double kl_threshold = 0.0; // M / 32
  bool kl_ok = false;
};

/// Packing-radius calibration and the resulting pairwise KL over the packing
/// class. Without `M`, M is the smallest multiple of 8, at least 32, whose
/// radius S/(6M) does not exceed the calibrated one.
FanoReport fano_calibration(double alpha,
                            double C,
                            const HolderParams& holder,
                            double sigma,
                            std::size_t nP,
                            std::size_t nQ,
                            std::optional<int> M = std::nullopt);

struct LeCamReport
{
  double t = 0.0;
  double kl = 0.0;          // by quadrature
  double kl_formula = 0.0;  // L^2/(2s^2) (nP (1-t)^(2b+alpha) + nQ (1-t)^(2b))
  bool kl_ok = false;       // kl <= 2
};

LeCamReport lecam_calibration(double alpha, const HolderParams& holder, double sigma, std::size_t nP, std::size_t nQ);

} // namespace covshift::lowerbound
