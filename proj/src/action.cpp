#include "skam/action.hpp"

#include <algorithm>
#include <cmath>

namespace skam {

Series act(const ActionInstance& inst, const GroupElement& g, const Series& x) { return inst.act(g, x); }

Series act_by_inverse(const ActionInstance& inst, const GroupElement& g, const Series& x) {
  if (inst.act_inverse) return inst.act_inverse(g, x);
  return inst.act(ginv(g), x);
}

Series rho(const ActionInstance& inst, const AlgebraElement& xi) { return inst.inf_act(xi, inst.origin); }

AlgebraElement apply_j(const ActionInstance& inst, const Series& x) { return AlgebraElement(inst.right_inverse(x)); }

double infinitesimal_defect(const ActionInstance& inst, const AlgebraElement& xi, const Series& x, double t,
                            std::span<const double> scales) {
  const Series quotient = (1.0 / t) * (inst.act(gexp(t * xi), x) - x);
  const Series defect = quotient - inst.inf_act(xi, x);
  double worst = 0.0;
  for (double s : scales) worst = std::max(worst, norm(defect, s));
  return worst;
}

std::vector<double> check_infinitesimal(const ActionInstance& inst, const AlgebraElement& xi, const Series& x,
                                        std::span<const double> t_values, std::span<const double> scales) {
  std::vector<double> out;
  out.reserve(t_values.size());
  for (double t : t_values) out.push_back(infinitesimal_defect(inst, xi, x, t, scales));
  return out;
}

double ac_lhs(const ActionInstance& inst, const AlgebraElement& xi, double s) {
  return norm(act_by_inverse(inst, gexp(xi), rho(inst, xi)), s);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need matching samples");
  double mx = 0, my = 0;
  const double n = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double ac_scaling_slope(const ActionInstance& inst, const AlgebraElement& xi, double s,
                        std::span<const double> t_values) {
  std::vector<double> lhs;
  for (double t : t_values) lhs.push_back(ac_lhs(inst, t * xi, s));
  return loglog_slope(t_values, lhs);
}

AcReport verify_ac(const ActionInstance& inst, std::span<const AlgebraElement> samples,
                   std::span<const ScalePair> grid, AcDomain domain) {
  AcReport report;
  for (const auto& p : grid) {
    if (!valid(p, 2)) {
      report.skipped += int(samples.size());
      continue;
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& xi = samples[i];
      const double wide = norm(xi, p.s + 2.0 * p.sigma);
      const double radius = domain == AcDomain::phi_ball ? p.sigma : 1.0;
      if (wide > radius || wide == 0.0) {
        // xi = 0 is in the domain but carries no information about c.
        if (wide == 0.0) ++report.samples;
        else ++report.skipped;
        continue;
      }
      ++report.samples;
      const double ratio = ac_lhs(inst, xi, p.s) * p.sigma / (wide * wide);
      if (ratio > report.max_ratio) {
        report.max_ratio = ratio;
        report.worst_scale = p;
        report.worst_sample = int(i);
      }
    }
  }
  report.c_estimate = std::max(1.0, report.max_ratio);
  return report;
}

AcReport merge(const AcReport& a, const AcReport& b) {
  AcReport out = a.max_ratio >= b.max_ratio ? a : b;
  out.samples = a.samples + b.samples;
  out.skipped = a.skipped + b.skipped;
  out.c_estimate = std::max(1.0, out.max_ratio);
  return out;
}

PhiResult phi(const ActionInstance& inst, const AlgebraElement& xi, double s, double sigma,
              const ActionConstants& constants, double tolerance) {
  if (!valid(ScalePair{s, sigma}, 2)) throw DomainGuardError("phi: requires 0 < s < s + 2 sigma < 1");
  const double wide = norm(xi, s + 2.0 * sigma);
  if (wide > sigma) throw DomainGuardError("phi: xi outside sigma B_{s+2 sigma}");

  const Series pulled_back = act_by_inverse(inst, gexp(xi), rho(inst, xi));
  PhiResult out{apply_j(inst, pulled_back)};
  out.value_norm = norm(out.value, s);
  out.bound = constants.c * constants.Nj * std::pow(sigma, -double(constants.k) - 1.0) * wide * wide;
  out.margin = out.bound - out.value_norm;
  if (out.margin < -tolerance) {
    throw CertificateError("phi: quadratic bound violated (|phi| = " + std::to_string(out.value_norm) +
                           ", bound = " + std::to_string(out.bound) + ")");
  }
  return out;
}

PhiResult phi(const ActionInstance& inst, const AlgebraElement& xi, double s, double sigma) {
  return phi(inst, xi, s, sigma, inst.measured);
}

}  // namespace skam
