#include "skam/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace skam {

Schedule::Schedule(double s, double delta, int n_max) : s_(s), delta_(delta) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("schedule: s must lie in (0, 1)");
  if (!(delta > 0.0 && delta < s)) throw std::domain_error("schedule: need 0 < delta < s");
  if (n_max < 0) throw std::invalid_argument("schedule: n_max must be nonnegative");
  scales_.push_back(s);
  for (int n = 0; n <= n_max; ++n) {
    entries_.push_back({n, scales_.back(), sigma(n)});
    scales_.push_back(scales_.back() - 2.0 * sigma(n));
  }
}

void check_delta(double s, double delta, const ActionConstants& constants) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("s must lie in (0, 1)");
  if (!(delta > 0.0 && delta < s)) throw std::domain_error("delta must lie in (0, s)");
  if (delta > 4.0 * std::pow(constants.Nj, 1.0 / (constants.k + 1))) {
    throw std::domain_error("delta exceeds 4 N(j)^{1/(k+1)}");
  }
}

namespace {

void check_constants(int k, double c, double Nj, double delta) {
  if (k < 0) throw std::domain_error("loss exponent must be nonnegative");
  if (!(c >= 1.0)) throw std::domain_error("the (A_c) constant must satisfy c >= 1");
  if (!(Nj > 0.0)) throw std::domain_error("N(j) must be positive");
  if (!(delta > 0.0)) throw std::domain_error("delta must be positive");
  if (delta > 4.0 * std::pow(Nj, 1.0 / (k + 1))) throw std::domain_error("delta exceeds 4 N(j)^{1/(k+1)}");
}

// log of c Nj sigma_m^{-k-1} with sigma_m = 2^{-(m+2)} delta.
double log_factor(int m, int k, double c, double Nj, double delta) {
  return std::log(c * Nj) - (k + 1.0) * (std::log(delta) - (m + 2.0) * std::log(2.0));
}

}  // namespace

double epsilon_closed_form(int k, double c, double Nj, double delta) {
  check_constants(k, c, Nj, delta);
  return std::pow(delta, 2.0 * k + 2.0) / (std::pow(4.0, 3.0 * k + 4.0) * c * Nj * Nj);
}

double epsilon_product(int k, double c, double Nj, double delta, int terms) {
  if (terms < 1) throw std::invalid_argument("epsilon_product: need at least one factor");
  check_constants(k, c, Nj, delta);
  const double sigma0 = delta / 4.0;
  double log_eps = std::log(c * delta / (16.0 * sigma0));
  for (int m = 0; m < terms; ++m) log_eps -= std::ldexp(log_factor(m, k, c, Nj, delta), -m);
  return std::exp(log_eps);
}

double mu(int n, int k, double c, double Nj, double delta, int terms) {
  if (n < 0 || terms < 1) throw std::invalid_argument("mu: need n >= 0 and terms >= 1");
  check_constants(k, c, Nj, delta);
  double log_mu = 0.0;
  for (int m = n + 1; m <= n + terms; ++m) {
    const double lf = log_factor(m, k, c, Nj, delta);
    if (lf < 0.0) throw std::domain_error("mu: c N(j) sigma_m^{-k-1} < 1");
    log_mu -= std::ldexp(lf, -m);
  }
  return std::exp(log_mu);
}

double g_sequence(int n) {
  if (n < 0) throw std::invalid_argument("g_sequence: n must be nonnegative");
  double g = 1.0 / 16.0;
  for (int i = 1; i <= n; ++i) {
    const double t = i + 1 > 10 ? 0.0 : std::ldexp(1.0, -(1 << (i + 1)));
    g = (1.0 + t) * g + t;
  }
  return g;
}

// ---------------------------------------------------------------------------

bool CertificateReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed(); });
}

int CertificateReport::failures() const {
  return int(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed(); }));
}

double CertificateReport::min_margin(const std::string& name) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : checks) {
    if (c.name == name) best = std::min(best, c.margin());
  }
  return best;
}

const CertificateCheck* CertificateReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed()) return &c;
  }
  return nullptr;
}

namespace {

// 2^e for integer e, saturating to 0 far below the subnormal range.
double pow2(long long e) { return e < -2000 ? 0.0 : std::ldexp(1.0, int(e)); }

double pow_int(double base, long long e) {
  double r = 1.0;
  for (long long i = 0; i < e && r != 0.0; ++i) r *= base;
  return r;
}

}  // namespace

CertificateReport verify_preliminary_remark(double delta, int n_max) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("verify_preliminary_remark: need 0 < delta < 1");
  CertificateReport report;
  for (int n = 0; n <= n_max; ++n) {
    const long long p = 1LL << n;
    report.add("scale_margin", n, pow_int(delta, p - 1) * pow2(n + 3 - 4 * p), 1.0);
  }
  return report;
}

CertificateReport verify_sigma_ratio(double delta, int n_max) {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::domain_error("auxiliary inequality: need 0 < delta <= 1");
  CertificateReport report;
  for (int n = 0; n <= n_max; ++n) {
    const long long p = 1LL << n;
    report.add("sigma_ratio", n, pow_int(delta, p - 1) * pow2(n + 2 - 2 * p), 1.0);
  }
  return report;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "Converged";
    case SolveStatus::max_iterations: return "MaxIterations";
    case SolveStatus::domain_guard_tripped: return "DomainGuardTripped";
    case SolveStatus::certificate_failed: return "CertificateFailed";
  }
  return "?";
}

// ---------------------------------------------------------------------------

namespace {

ActionConstants solver_constants(const ActionInstance& inst, const SolveConfig& cfg) {
  ActionConstants k = inst.measured.inflated(cfg.safety_factor);
  k.c = std::max(1.0, k.c);
  return k;
}

// (base)^{2^n} through logs; 0 once it underflows.
double pow_two_power(double base, int n) {
  if (base <= 0.0) return 0.0;
  const double e = std::ldexp(1.0, n) * std::log(base);
  return e < -745.0 ? 0.0 : std::exp(e);
}

}  // namespace

double certified_epsilon(const ActionInstance& inst, const SolveConfig& cfg) {
  const auto k = solver_constants(inst, cfg);
  return epsilon_closed_form(k.k, k.c, k.Nj, cfg.delta);
}

SolveResult solve(const ActionInstance& inst, const Series& x, const SolveConfig& cfg) {
  SolveResult out;
  out.constants = solver_constants(inst, cfg);
  const auto& K = out.constants;
  ActionConstants raw = inst.measured;
  raw.c = std::max(1.0, raw.c);
  check_delta(cfg.s, cfg.delta, K);
  if (cfg.max_iter < 0 || !(cfg.tol > 0.0)) throw std::invalid_argument("solve: bad iteration settings");

  const Schedule sched(cfg.s, cfg.delta, cfg.max_iter + 1);
  const double s_final = sched.limit();
  const double s_residual = s_final / 2.0;
  const int order = x.order();
  const double eps = std::numeric_limits<double>::epsilon();

  out.epsilon = epsilon_closed_form(K.k, K.c, K.Nj, cfg.delta);
  out.input_norm = norm(x, cfg.s);
  out.certified_input = out.input_norm <= out.epsilon;
  out.g = GroupElement::identity(order);

  const double noise = 1e-10 + order * eps * out.input_norm;
  const double invariant_tol = cfg.tol + order * eps * out.input_norm;

  auto bounds_row = [&](int n, const AlgebraElement& xi, const AlgebraElement& gamma, const AlgebraElement& gamma_prev,
                        const Series& xn) {
    IterationRow row;
    row.n = n;
    row.s_n = sched.scale(n);
    row.sigma_n = sched.sigma(n);
    const double s_next = sched.scale(n + 1);
    row.xi_norm = norm(xi, s_next);
    row.lemma1_bound = pow_two_power(cfg.delta / 16.0, n);
    row.mu_n = mu(n, K.k, K.c, K.Nj, cfg.delta, cfg.mu_terms);
    row.sharp_bound = pow_two_power(cfg.delta * row.mu_n / 16.0, n);
    row.gamma_norm = norm(gamma, s_next);
    row.g_n = g_sequence(n);
    row.x_norm = norm(xn, row.s_n);
    row.cauchy_inc = norm(gamma - gamma_prev, s_final);
    row.lemma3_bound = (1.0 + K.kappa) * pow_two_power(0.5, n + 1);
    row.truncation = truncation_band(xi.series(), s_next);
    try {
      const double raw_mu = mu(n, raw.k, raw.c, raw.Nj, cfg.delta, cfg.mu_terms);
      row.raw_sharp_margin = pow_two_power(cfg.delta * raw_mu / 16.0, n) - row.xi_norm;
    } catch (const std::domain_error&) {
      row.raw_sharp_margin = std::numeric_limits<double>::quiet_NaN();
    }
    row.raw_cauchy_margin = (1.0 + raw.kappa) * pow_two_power(0.5, n + 1) - row.cauchy_inc;

    out.certificates.add("xi_decay", n, row.xi_norm, row.lemma1_bound, noise);
    out.certificates.add("xi_decay_sharp", n, row.xi_norm, row.sharp_bound, noise);
    out.certificates.add("gamma_bound", n, row.gamma_norm, row.g_n, noise);
    out.certificates.add("g_below_one", n, row.g_n, 1.0);
    out.certificates.add("cauchy_rate", n, row.cauchy_inc, row.lemma3_bound, noise);
    out.trace.push_back(row);
  };

  auto fail = [&](SolveStatus status, std::string reason) {
    out.status = status;
    out.reason = std::move(reason);
    return out;
  };

  // Step 0.
  AlgebraElement xi;
  try {
    xi = apply_j(inst, x);
  } catch (const std::domain_error& e) {
    return fail(SolveStatus::domain_guard_tripped, std::string("j(x) is not in the algebra: ") + e.what());
  }
  Series xn = x;
  AlgebraElement gamma = xi;
  out.certificates.add("invariant_rho_j", 0, norm(rho(inst, xi) - xn, sched.scale(1)), 0.0, invariant_tol);
  bounds_row(0, xi, gamma, AlgebraElement::zero(order), xn);

  int n = 0;
  while (true) {
    if (!out.certificates.passed()) {
      const auto* f = out.certificates.first_failure();
      return fail(SolveStatus::certificate_failed,
                  f->name + " violated at n = " + std::to_string(f->step) + (out.certified_input ? "" : " (input outside the certified ball)"));
    }
    if (out.trace.back().xi_norm < cfg.tol) break;
    if (n == cfg.max_iter) {
      out.iterations = n;
      return fail(SolveStatus::max_iterations, "xi did not drop below tol");
    }
    ++n;
    const double sigma = sched.sigma(n);
    const double s_next = sched.scale(n + 1);
    if (norm(xi, sched.scale(n)) > sigma) {
      out.iterations = n - 1;
      return fail(SolveStatus::domain_guard_tripped, "xi_" + std::to_string(n - 1) + " left sigma_" +
                                                         std::to_string(n) + " B_{s_" + std::to_string(n) + "}");
    }
    PhiResult step;
    try {
      step = phi(inst, xi, s_next, sigma, K, noise);
    } catch (const CertificateError& e) {
      out.iterations = n;
      return fail(SolveStatus::certificate_failed, e.what());
    } catch (const std::domain_error& e) {
      out.iterations = n - 1;
      return fail(SolveStatus::domain_guard_tripped, e.what());
    }
    out.certificates.add("phi_bound", n, step.value_norm, step.bound, noise);

    // x_n = (e^{xi_{n-1}})^-1 x_{n-1}; must agree with rho(xi_n).
    xn = act_by_inverse(inst, gexp(xi), xn);
    xi = step.value;
    out.certificates.add("invariant_rho_j", n, norm(rho(inst, xi) - xn, s_next), 0.0, invariant_tol);
    out.certificates.add("invariant_j_rho", n, norm(apply_j(inst, xn) - xi, s_next), 0.0, invariant_tol);

    const AlgebraElement gamma_prev = gamma;
    gamma = glog(gmul(gexp(gamma), gexp(xi)));
    bounds_row(n, xi, gamma, gamma_prev, xn);
  }

  out.iterations = n;
  out.g = gexp(gamma);
  out.residual = norm(act(inst, out.g, inst.origin) - x, s_residual);
  out.certificates.add("chart_ball", n, norm(gamma, s_final), 1.0, noise);
  out.certificates.add("residual", n, out.residual, cfg.residual_tol);
  if (!out.certificates.passed()) {
    const auto* f = out.certificates.first_failure();
    return fail(SolveStatus::certificate_failed, f->name + " violated");
  }
  out.status = SolveStatus::converged;
  return out;
}

std::vector<double> quadratic_log_ratios(const IterationTrace& trace) {
  auto eligible = [](double v) { return v > 1e-14 && v < 1e-1; };
  std::vector<double> ratios;
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    if (eligible(trace[i].xi_norm) && eligible(trace[i + 1].xi_norm)) {
      ratios.push_back(std::log(trace[i + 1].xi_norm) / std::log(trace[i].xi_norm));
    }
  }
  return ratios;
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double quadratic_rate(const IterationTrace& trace) {
  auto ratios = quadratic_log_ratios(trace);
  if (ratios.empty()) throw std::invalid_argument("quadratic_rate: no consecutive eligible steps");
  return median(std::move(ratios));
}

double quadratic_rate(std::span<const IterationTrace> traces) {
  std::vector<double> pooled;
  for (const auto& t : traces) {
    const auto r = quadratic_log_ratios(t);
    pooled.insert(pooled.end(), r.begin(), r.end());
  }
  if (pooled.empty()) throw std::invalid_argument("quadratic_rate: no consecutive eligible steps");
  return median(std::move(pooled));
}

void write_trace_csv(std::ostream& os, const IterationTrace& trace) {
  os << "n,s_n,sigma_n,xi_norm,lemma1_bound,mu_n,gamma_norm,g_n,x_norm,cauchy_inc,lemma3_bound\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.16e", v);
    os << buf;
  };
  for (const auto& r : trace) {
    os << r.n;
    put(r.s_n);
    put(r.sigma_n);
    put(r.xi_norm);
    put(r.lemma1_bound);
    put(r.mu_n);
    put(r.gamma_norm);
    put(r.g_n);
    put(r.x_norm);
    put(r.cauchy_inc);
    put(r.lemma3_bound);
    os << '\n';
  }
}

}  // namespace skam
