#pragma once

// Concrete actions.
//
// Germ action: G = invertible germs fixing 0, E = germs vanishing at 0 (one
// complex variable, truncated at degree D), base point a with a'(0) != 0:
//
//   g x      = (a + x) o g^-1 - a
//   xi x     = -(a + x)' xi
//   rho(xi)  = -a' xi,        j(x) = -x / a'        (k = 0)
//
// Cohomological operator on Fourier scales: the right inverse of
// xi -> xi(. + alpha) - xi on zero-mean series, which divides mode m by the
// small divisor e^{2 pi i m alpha} - 1 and therefore loses regularity (k > 0).

#include "skam/action.hpp"
#include "skam/operator_norm.hpp"

#include <cstdint>
#include <vector>

namespace skam {

struct GermActionSpec {
  Series a = Series::identity(32);

  static GermActionSpec identity(int order) { return {Series::identity(order)}; }
  int order() const { return a.order(); }
};

/// How the instance constants are measured.
struct MeasurementConfig {
  std::vector<double> scales{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  std::vector<double> sigmas{0.01, 0.02, 0.05, 0.1};
  int samples_per_point = 8;
  std::uint64_t seed = 0x6a09e667f3bcc908ULL;
};

/// Number of zeros of the polynomial f inside |z| < radius (argument
/// principle; the circle is sampled at `angles` points).
int zeros_in_disc(const Series& f, double radius, int angles = 4096);

/// The germ action with c, N(j), kappa measured and stored in `measured`.
ActionInstance build_germ_instance(const GermActionSpec& spec, const MeasurementConfig& cfg = {});

/// The germ action with given constants and no measurement pass.
ActionInstance make_germ_action(const GermActionSpec& spec, const ActionConstants& constants);

/// `count` in-domain group-law samples, cycling through the grid points
/// (xi in B_{s+2 sigma}, eta in sigma B_s, random radii).
std::vector<GroupLawSample> group_law_samples(int order, std::span<const ScalePair> grid, int count,
                                              std::uint64_t seed);

/// Exact solution of g 0_E = x for the a = id germ action: g = (id + x)^-1.
GroupElement reversion_oracle(const Series& x);

struct DiophantineSpec {
  double alpha = 0.6180339887498949;  // (sqrt 5 - 1) / 2
  double tau = 1.0;
  double C = 0.0;      // required lower bound on |m|^tau |e^{2 pi i m alpha} - 1|
  int modes = 64;      // Fourier truncation M
  double width = 1.0;  // strip width factor W of the Fourier norm
};

inline constexpr double kDivisorFloor = 1e-15;

/// min over 1 <= |m| <= M of |m|^tau |e^{2 pi i m alpha} - 1|.
double diophantine_margin(const DiophantineSpec& spec);

/// x -> sum_{m != 0} x_m / (e^{2 pi i m alpha} - 1) e^{2 pi i m theta}.
class CohomologicalOperator {
 public:
  explicit CohomologicalOperator(DiophantineSpec spec);

  const DiophantineSpec& spec() const { return spec_; }
  Series shape() const { return Series::zero_fourier(spec_.modes, spec_.width); }
  std::complex<double> divisor(int m) const;

  /// Requires a zero-mean input of the operator's shape.
  Series operator()(const Series& x) const;

  /// The forward operator xi -> xi(. + alpha) - xi.
  Series difference(const Series& xi) const;

  /// Basis indices of the zero-mean domain.
  std::vector<int> domain_basis() const;

 private:
  DiophantineSpec spec_;
};

CohomologicalOperator build_cohomological_j(const DiophantineSpec& spec);

struct LossExponentScan {
  int k = -1;                             // smallest stabilizing exponent, -1 if none
  std::vector<int> modes;                 // M values scanned
  std::vector<std::vector<double>> norms; // norms[k][i] = N at modes[i]
};

/// Measure N(j) for k = 0..k_max over M in `modes` and pick the smallest k
/// whose estimates vary by at most `rel_tol` (max/min - 1).
LossExponentScan select_loss_exponent(DiophantineSpec spec, std::span<const int> modes,
                                      std::span<const ScalePair> grid, int k_max = 4, double rel_tol = 0.10);

/// Log-spaced sigma values sigma_max 2^{-i}, i = 0..count-1, for scans that
/// must see small losses.
std::vector<double> dyadic_sigmas(double sigma_max, int count);

}  // namespace skam
