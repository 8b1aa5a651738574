#include "skam/instances.hpp"

#include "skam/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace skam {

int zeros_in_disc(const Series& f, double radius, int angles) {
  auto eval = [&](std::complex<double> z) {
    std::complex<double> v = 0;
    for (int m = f.order(); m >= 0; --m) v = v * z + f.coeff(m);
    return v;
  };
  // Winding number of f around 0 along |z| = radius.
  double turns = 0.0;
  std::complex<double> prev = eval(radius);
  for (int q = 1; q <= angles; ++q) {
    const std::complex<double> cur = eval(std::polar(radius, 2.0 * std::numbers::pi * q / angles));
    if (std::abs(cur) < kInvertibilityThreshold) throw std::domain_error("zeros_in_disc: zero on the boundary circle");
    turns += std::arg(cur / prev);
    prev = cur;
  }
  return int(std::lround(turns / (2.0 * std::numbers::pi)));
}

ActionInstance make_germ_action(const GermActionSpec& spec, const ActionConstants& constants) {
  const Series a = spec.a;
  if (a.kind() != SeriesKind::taylor) throw std::invalid_argument("germ action: base point must be a taylor series");
  const Series da = differentiate(a);
  if (std::abs(da.coeff(0)) < kInvertibilityThreshold) {
    throw std::domain_error("germ action: a'(0) vanishes, rho has no right inverse");
  }
  const Series inv_da = reciprocal(da);

  ActionInstance inst;
  inst.name = "germ";
  inst.origin = a.zero_like();
  inst.act = [a](const GroupElement& g, const Series& x) { return compose(a + x, ginv(g).as_map()) - a; };
  inst.act_inverse = [a](const GroupElement& g, const Series& x) { return compose(a + x, g.as_map()) - a; };
  inst.inf_act = [a](const AlgebraElement& xi, const Series& x) {
    return -multiply(differentiate(a + x), xi.series());
  };
  inst.right_inverse = [inv_da](const Series& x) { return -multiply(inv_da, x); };
  inst.measured = constants;
  return inst;
}

std::vector<GroupLawSample> group_law_samples(int order, std::span<const ScalePair> grid, int count,
                                              std::uint64_t seed) {
  std::vector<ScalePair> usable;
  for (const auto& p : grid) {
    if (valid(p, 2)) usable.push_back(p);
  }
  if (usable.empty()) throw std::invalid_argument("group_law_samples: no grid point with s + 2 sigma < 1");
  const Series shape = Series::zero_taylor(order);
  const SplitMix64 root(seed);
  std::vector<GroupLawSample> out;
  out.reserve(std::size_t(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    const ScalePair p = usable[std::size_t(i) % usable.size()];
    SplitMix64 rng = root.fork(std::uint64_t(i));
    const double u = rng.uniform(0.05, 1.0);
    const double v = rng.uniform(0.05, 1.0);
    Series xi = random_series(rng, shape, p.s + 2.0 * p.sigma, u);
    Series eta = random_series(rng, shape, p.s, v * p.sigma);
    out.push_back({AlgebraElement(std::move(xi)), AlgebraElement(std::move(eta)), p});
  }
  return out;
}

ActionInstance build_germ_instance(const GermActionSpec& spec, const MeasurementConfig& cfg) {
  const Series da = differentiate(spec.a);
  if (zeros_in_disc(da, 1.0) != 0) throw std::domain_error("germ action: a' vanishes on the unit disc");
  ActionInstance inst = make_germ_action(spec, {});
  const int order = spec.order();

  const auto nj_grid = make_grid(cfg.scales, cfg.sigmas);
  const auto est = measure_operator_norm(inst.right_inverse, inst.origin, 0, nj_grid);

  const auto grid2 = make_grid(cfg.scales, cfg.sigmas, 2);
  SplitMix64 root(cfg.seed);
  AcReport ac;
  std::uint64_t id = 0;
  for (const auto& p : grid2) {
    std::vector<AlgebraElement> samples;
    for (int i = 0; i < cfg.samples_per_point; ++i) {
      SplitMix64 rng = root.fork(id++);
      const double u = rng.uniform(0.05, 1.0);
      samples.emplace_back(random_series(rng, inst.origin, p.s + 2.0 * p.sigma, u * p.sigma));
    }
    const ScalePair one[] = {p};
    ac = merge(ac, verify_ac(inst, samples, one));
  }

  const auto gl_samples =
      group_law_samples(order, grid2, int(grid2.size()) * cfg.samples_per_point, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto gl = verify_group_law(gl_samples);

  inst.measured = ActionConstants{0, ac.c_estimate, est.N, gl.kappa_estimate};
  return inst;
}

GroupElement reversion_oracle(const Series& x) {
  const Series r = reversion(Series::identity(x.order()) + x);
  return GroupElement(AlgebraElement(r - Series::identity(x.order())));
}

// ---------------------------------------------------------------------------

double diophantine_margin(const DiophantineSpec& spec) {
  if (spec.modes < 1) throw std::invalid_argument("diophantine_margin: need at least one mode");
  double best = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= spec.modes; ++m) {
    const double turns = std::remainder(double(m) * spec.alpha, 1.0);
    const double d = std::abs(std::polar(1.0, 2.0 * std::numbers::pi * turns) - 1.0);
    // |e^{-i t} - 1| = |e^{i t} - 1|, so negative modes repeat the positive ones.
    best = std::min(best, std::pow(double(m), spec.tau) * d);
  }
  return best;
}

CohomologicalOperator::CohomologicalOperator(DiophantineSpec spec) : spec_(spec) {
  if (spec_.modes < 1) throw std::invalid_argument("cohomological operator: need at least one mode");
  const double margin = diophantine_margin(spec_);
  if (margin < kDivisorFloor) throw std::domain_error("cohomological operator: small divisor underflow");
  if (margin < spec_.C) throw std::domain_error("cohomological operator: rotation number fails the diophantine bound");
  for (int m = 1; m <= spec_.modes; ++m) {
    if (std::abs(divisor(m)) < kDivisorFloor) throw std::domain_error("cohomological operator: divisor underflow");
  }
}

std::complex<double> CohomologicalOperator::divisor(int m) const {
  // 2 pi m alpha reduced mod 1 first so that large m keep full precision.
  const double turns = std::remainder(double(m) * spec_.alpha, 1.0);
  return std::polar(1.0, 2.0 * std::numbers::pi * turns) - 1.0;
}

Series CohomologicalOperator::operator()(const Series& x) const {
  x.require_same_shape(shape());
  if (x.coeff(0) != std::complex<double>(0)) throw std::domain_error("cohomological operator: input has nonzero mean");
  Series out = x.zero_like();
  for (int m = 1; m <= spec_.modes; ++m) {
    out.coeff(m) = x.coeff(m) / divisor(m);
    out.coeff(-m) = x.coeff(-m) / divisor(-m);
  }
  return out;
}

Series CohomologicalOperator::difference(const Series& xi) const {
  xi.require_same_shape(shape());
  Series out = xi.zero_like();
  for (int m = -spec_.modes; m <= spec_.modes; ++m) out.coeff(m) = xi.coeff(m) * divisor(m);
  return out;
}

std::vector<int> CohomologicalOperator::domain_basis() const {
  std::vector<int> basis;
  for (int m = -spec_.modes; m <= spec_.modes; ++m) {
    if (m != 0) basis.push_back(m);
  }
  return basis;
}

CohomologicalOperator build_cohomological_j(const DiophantineSpec& spec) { return CohomologicalOperator(spec); }

LossExponentScan select_loss_exponent(DiophantineSpec spec, std::span<const int> modes,
                                      std::span<const ScalePair> grid, int k_max, double rel_tol) {
  LossExponentScan scan;
  scan.modes.assign(modes.begin(), modes.end());
  scan.norms.assign(k_max + 1, {});
  for (int M : modes) {
    spec.modes = M;
    const CohomologicalOperator j(spec);
    OperatorNormOptions opt;
    opt.basis = j.domain_basis();
    for (int k = 0; k <= k_max; ++k) {
      // Linearity is a property of j, not of k; check it once per M.
      opt.linearity_pairs = k == 0 ? 8 : 0;
      scan.norms[k].push_back(measure_operator_norm(j, j.shape(), k, grid, opt).N);
    }
  }
  for (int k = 0; k <= k_max && scan.k < 0; ++k) {
    const auto [lo, hi] = std::minmax_element(scan.norms[k].begin(), scan.norms[k].end());
    if (*lo > 0.0 && *hi / *lo - 1.0 <= rel_tol) scan.k = k;
  }
  return scan;
}

std::vector<double> dyadic_sigmas(double sigma_max, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(std::ldexp(sigma_max, -i));
  return out;
}

}  // namespace skam
