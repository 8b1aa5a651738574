#include "skam/group.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace skam {

AlgebraElement::AlgebraElement(Series xi) : xi_(std::move(xi)) {
  if (xi_.kind() != SeriesKind::taylor) throw std::invalid_argument("algebra element must be a taylor series");
  if (xi_.coeff(0) != std::complex<double>(0)) {
    throw std::domain_error("algebra element must vanish at the origin");
  }
}

GroupElement::GroupElement(AlgebraElement displacement) : displacement_(std::move(displacement)) {
  const auto linear = 1.0 + (order() >= 1 ? displacement_.series().coeff(1) : std::complex<double>(0));
  if (order() < 1 || std::abs(linear) < kInvertibilityThreshold) {
    throw std::domain_error("group element is not an invertible germ");
  }
}

Series GroupElement::as_map() const { return Series::identity(order()) + displacement_.series(); }

GroupElement gexp(const AlgebraElement& xi) { return GroupElement(xi); }

GroupElement gexp(const AlgebraElement& xi, double s) {
  if (!(norm(xi, s) < 2.0)) throw std::domain_error("gexp: outside the chart domain 2B");
  return GroupElement(xi);
}

AlgebraElement glog(const GroupElement& g) { return g.displacement(); }

GroupElement gmul(const GroupElement& g, const GroupElement& h) {
  // (id + xi) o (id + eta) = id + eta + xi o (id + eta)
  const Series& xi = g.displacement().series();
  const Series& eta = h.displacement().series();
  return GroupElement(AlgebraElement(eta + compose(xi, h.as_map())));
}

GroupElement ginv(const GroupElement& g) {
  const Series r = reversion(g.as_map());
  return GroupElement(AlgebraElement(r - Series::identity(g.order())));
}

GroupLawReport verify_group_law(const AlgebraElement& xi, const AlgebraElement& eta, double s, double sigma,
                                std::optional<double> kappa, ProductOrientation orientation) {
  GroupLawReport report;
  const bool in_domain = sigma > 0.0 && s > 0.0 && s + 2.0 * sigma < 1.0 && norm(xi, s + 2.0 * sigma) <= 1.0 &&
                         norm(eta, s) <= sigma;
  if (!in_domain) {
    report.skipped = 1;
    return report;
  }
  const auto product = orientation == ProductOrientation::composition ? gmul(gexp(xi), gexp(eta))
                                                                       : gmul(gexp(eta), gexp(xi));
  const AlgebraElement log_product = glog(product);
  const double xi_wide = norm(xi, s + 2.0 * sigma);
  const double eta_s = norm(eta, s);

  report.samples = 1;
  report.margin_first = norm(xi, s + sigma) + eta_s - norm(log_product, s);

  const double remainder = norm(log_product - xi - eta, s);
  const double denom = xi_wide * eta_s;
  report.kappa_estimate = denom > 0.0 ? remainder * sigma / denom : 0.0;
  const double k = kappa.value_or(report.kappa_estimate);
  report.margin_second = k * denom / sigma - remainder;
  return report;
}

GroupLawReport verify_group_law(std::span<const GroupLawSample> samples, ProductOrientation orientation) {
  struct Row {
    double remainder_bound_factor;  // |xi|_{s+2sigma} |eta|_s / sigma
    double remainder;
  };
  std::vector<Row> rows;
  GroupLawReport total;
  for (const auto& smp : samples) {
    const auto r = verify_group_law(smp.xi, smp.eta, smp.scale.s, smp.scale.sigma, std::nullopt, orientation);
    total.samples += r.samples;
    total.skipped += r.skipped;
    if (r.samples == 0) continue;
    total.kappa_estimate = std::max(total.kappa_estimate, r.kappa_estimate);
    total.margin_first = std::min(total.margin_first, r.margin_first);
    const double factor = norm(smp.xi, smp.scale.s + 2.0 * smp.scale.sigma) * norm(smp.eta, smp.scale.s) /
                          smp.scale.sigma;
    rows.push_back({factor, factor * r.kappa_estimate});
  }
  for (const auto& row : rows) {
    total.margin_second = std::min(total.margin_second, total.kappa_estimate * row.remainder_bound_factor - row.remainder);
  }
  return total;
}

void write_group_element(std::ostream& os, const GroupElement& g) {
  write_series(os, g.displacement().series(), "group=1");
}

GroupElement read_group_element(std::istream& is) {
  SeriesHeader header;
  Series x = read_series(is, &header);
  if (!header.group) throw std::runtime_error("series file is not a group element (missing group=1)");
  return GroupElement(AlgebraElement(std::move(x)));
}

}  // namespace skam
