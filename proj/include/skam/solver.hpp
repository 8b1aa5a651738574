#pragma once

// Quadratically convergent solution of the orbit equation g 0_E = x.
//
// Starting from xi_0 = j(x) the solver iterates xi_n = phi(xi_{n-1}) on the
// shrinking scales
//
//   s_0 = s,  s_{n+1} = s_n - 2 sigma_n,  sigma_n = 2^{-(n+2)} delta,
//
// accumulates gamma_n = log(e^{gamma_{n-1}} e^{xi_n}) and returns
// g = exp(lim gamma_n). Each step is checked against the a priori bounds
//
//   |xi_n|_{s_{n+1}}    <= (delta/16)^{2^n},  sharper (delta mu_n / 16)^{2^n}
//   |gamma_n|_{s_{n+1}} <= g_n <= 1
//   |gamma_n - gamma_{n-1}|_{s-delta} <= (1 + kappa) 2^{-2^{n+1}}
//
// which hold whenever |x|_s <= eps = delta^{2k+2} / (4^{3k+4} c N(j)^2).

#include "skam/action.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace skam {

struct ScheduleEntry {
  int n;
  double s_n;
  double sigma_n;
};

class Schedule {
 public:
  Schedule(double s, double delta, int n_max);

  double start() const { return s_; }
  double delta() const { return delta_; }
  double sigma(int n) const { return std::ldexp(delta_, -(n + 2)); }
  /// s_n for n <= n_max + 1.
  double scale(int n) const { return scales_.at(std::size_t(n)); }
  double limit() const { return s_ - delta_; }
  const std::vector<ScheduleEntry>& entries() const { return entries_; }

 private:
  double s_;
  double delta_;
  std::vector<double> scales_;
  std::vector<ScheduleEntry> entries_;
};

/// delta^{2k+2} / (4^{3k+4} c N(j)^2). Requires c >= 1, Nj > 0 and
/// 0 < delta <= 4 Nj^{1/(k+1)}.
double epsilon_closed_form(int k, double c, double Nj, double delta);

/// c delta / (16 sigma_0) prod_{m < terms} (c Nj sigma_m^{-k-1})^{-2^{-m}}, in log space.
double epsilon_product(int k, double c, double Nj, double delta, int terms);

/// mu_n = prod_{m = n+1}^{n+terms} (c Nj sigma_m^{-k-1})^{-2^{-m}}.
double mu(int n, int k, double c, double Nj, double delta, int terms = 60);

/// g_0 = 1/16, g_n = (1 + 2^{-2^{n+1}}) g_{n-1} + 2^{-2^{n+1}}.
double g_sequence(int n);

/// Throws std::domain_error unless 0 < delta < s < 1 and delta <= 4 Nj^{1/(k+1)}.
void check_delta(double s, double delta, const ActionConstants& constants);

struct CertificateCheck {
  std::string name;
  int step = 0;
  double value = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;

  double margin() const { return bound - value; }
  bool passed() const { return value <= bound + tolerance; }
};

struct CertificateReport {
  std::vector<CertificateCheck> checks;

  void add(std::string name, int step, double value, double bound, double tolerance = 0.0) {
    checks.push_back({std::move(name), step, value, bound, tolerance});
  }
  bool passed() const;
  int failures() const;
  /// Smallest margin among checks called `name` (+inf if none).
  double min_margin(const std::string& name) const;
  const CertificateCheck* first_failure() const;
};

/// (delta/16)^{2^n} <= sigma_{n+1} for n = 0..n_max, evaluated through the
/// exact ratio delta^{2^n - 1} 2^{n + 3 - 2^{n+2}} <= 1.
CertificateReport verify_preliminary_remark(double delta, int n_max);

/// sigma_n^{-1} (delta/16)^{2^n} <= 2^{-2^{n+1}} for n = 0..n_max, evaluated
/// through delta^{2^n - 1} 2^{n + 2 - 2^{n+1}} <= 1.
CertificateReport verify_sigma_ratio(double delta, int n_max);

struct IterationRow {
  int n = 0;
  double s_n = 0.0;
  double sigma_n = 0.0;
  double xi_norm = 0.0;       // |xi_n|_{s_{n+1}}
  double lemma1_bound = 0.0;  // (delta/16)^{2^n}
  double sharp_bound = 0.0;  // (delta mu_n/16)^{2^n}
  double mu_n = 0.0;
  double gamma_norm = 0.0;    // |gamma_n|_{s_{n+1}}
  double g_n = 0.0;
  double x_norm = 0.0;        // |x_n|_{s_n}
  double cauchy_inc = 0.0;    // |gamma_n - gamma_{n-1}|_{s-delta}
  double lemma3_bound = 0.0;  // (1 + kappa) 2^{-2^{n+1}}
  double truncation = 0.0;    // top-band weight of xi_n at s_{n+1}
  // Margins against the measured, uninflated constants (diagnostic only).
  double raw_sharp_margin = 0.0;
  double raw_cauchy_margin = 0.0;
};

using IterationTrace = std::vector<IterationRow>;

enum class SolveStatus { converged, max_iterations, domain_guard_tripped, certificate_failed };

const char* to_string(SolveStatus status);

struct SolveConfig {
  double s = 0.9;
  double delta = 0.5;
  int max_iter = 12;
  double tol = 1e-13;           // stop once |xi_n|_{s_{n+1}} < tol
  double residual_tol = 1e-10;  // required |g 0 - x|_{(s-delta)/2}
  double safety_factor = 1.5;
  int mu_terms = 60;
};

struct SolveResult {
  GroupElement g = GroupElement::identity(1);
  double residual = 0.0;
  IterationTrace trace;
  CertificateReport certificates;
  SolveStatus status = SolveStatus::max_iterations;
  int iterations = 0;
  double epsilon = 0.0;
  double input_norm = 0.0;
  bool certified_input = false;  // |x|_s <= eps
  ActionConstants constants;     // inflated constants used by the bounds
  std::string reason;
};

SolveResult solve(const ActionInstance& inst, const Series& x, const SolveConfig& cfg = {});

/// The epsilon the solver would certify for this instance and configuration.
double certified_epsilon(const ActionInstance& inst, const SolveConfig& cfg);

/// log|xi_{n+1}| / log|xi_n| for consecutive steps with both norms in
/// (1e-14, 1e-1).
std::vector<double> quadratic_log_ratios(const IterationTrace& trace);

double median(std::vector<double> v);

/// Median log-ratio of one run, or pooled over several. Throws
/// std::invalid_argument when no step pair is eligible.
double quadratic_rate(const IterationTrace& trace);
double quadratic_rate(std::span<const IterationTrace> traces);

void write_trace_csv(std::ostream& os, const IterationTrace& trace);

}  // namespace skam
