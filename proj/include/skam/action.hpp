#pragma once

// Scaled group actions on a scaled vector space E, their infinitesimal
// generators, the linear map rho(xi) = xi . 0_E with right inverse j, the
// quadratic smallness condition (A_c), and the iteration map
//
//   phi(xi) = j( (e^xi)^-1 (xi . 0_E) ).

#include "skam/group.hpp"
#include "skam/series.hpp"

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace skam {

class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainGuardError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Constants entering the size of the homogeneity ball.
struct ActionConstants {
  int k = 0;           // loss exponent of j
  double c = 1.0;      // (A_c) constant, c >= 1
  double Nj = 1.0;     // k-bounded norm of j
  double kappa = 0.0;  // second group-law constant

  ActionConstants inflated(double factor) const { return {k, c * factor, Nj * factor, kappa * factor}; }
};

struct ActionInstance {
  using ActFn = std::function<Series(const GroupElement&, const Series&)>;
  using InfActFn = std::function<Series(const AlgebraElement&, const Series&)>;
  using LinearFn = std::function<Series(const Series&)>;

  std::string name;
  Series origin;       // 0_E
  ActFn act;           // (g, x) -> g x
  ActFn act_inverse;   // (g, x) -> g^-1 x; optional, falls back to act(ginv(g), x)
  InfActFn inf_act;    // (xi, x) -> xi x
  LinearFn right_inverse;
  ActionConstants measured;
};

Series act(const ActionInstance& inst, const GroupElement& g, const Series& x);
Series act_by_inverse(const ActionInstance& inst, const GroupElement& g, const Series& x);

/// rho(xi) = xi . 0_E
Series rho(const ActionInstance& inst, const AlgebraElement& xi);
/// j(x), checked to land in the algebra.
AlgebraElement apply_j(const ActionInstance& inst, const Series& x);

/// max over `scales` of |(e^{t xi} x - x)/t - xi x|_s at one t.
double infinitesimal_defect(const ActionInstance& inst, const AlgebraElement& xi, const Series& x, double t,
                            std::span<const double> scales);

inline constexpr double kDifferenceSteps[] = {1e-2, 1e-3, 1e-4};

/// Defects for each t in `t_values` (usually kDifferenceSteps); first-order
/// consistency means they decay linearly in t.
std::vector<double> check_infinitesimal(const ActionInstance& inst, const AlgebraElement& xi, const Series& x,
                                        std::span<const double> t_values, std::span<const double> scales);

/// Left side of (A_c): |(e^xi)^-1 (xi . 0_E)|_s.
double ac_lhs(const ActionInstance& inst, const AlgebraElement& xi, double s);

/// Least-squares slope of log ac_lhs(t xi, s) against log t.
double ac_scaling_slope(const ActionInstance& inst, const AlgebraElement& xi, double s,
                        std::span<const double> t_values);

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct AcReport {
  double c_estimate = 1.0;  // max ratio, clamped below at 1
  double max_ratio = 0.0;   // unclamped
  int samples = 0;
  int skipped = 0;
  ScalePair worst_scale{0.0, 0.0};
  int worst_sample = -1;
};

enum class AcDomain {
  phi_ball,   // xi in sigma B_{s+2 sigma}, the domain of phi
  unit_ball,  // xi in B_{s+2 sigma}
};

/// ratio = |(e^xi)^-1 (xi . 0_E)|_s sigma / |xi|_{s+2 sigma}^2 over every
/// (grid point, sample) pair in the domain.
AcReport verify_ac(const ActionInstance& inst, std::span<const AlgebraElement> samples,
                   std::span<const ScalePair> grid, AcDomain domain = AcDomain::phi_ball);

AcReport merge(const AcReport& a, const AcReport& b);

struct PhiResult {
  AlgebraElement value;
  double value_norm = 0.0;  // |phi(xi)|_s
  double bound = 0.0;       // c N(j) sigma^{-k-1} |xi|_{s+2 sigma}^2
  double margin = 0.0;      // bound - value_norm
};

/// phi(xi) for xi in sigma B_{s+2 sigma}. Throws DomainGuardError outside the
/// ball and CertificateError when the quadratic bound fails by more than
/// `tolerance`.
PhiResult phi(const ActionInstance& inst, const AlgebraElement& xi, double s, double sigma,
              const ActionConstants& constants, double tolerance = 1e-10);
PhiResult phi(const ActionInstance& inst, const AlgebraElement& xi, double s, double sigma);

}  // namespace skam
