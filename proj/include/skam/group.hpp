#pragma once

// The scaled group of near-identity analytic germs z -> z + xi(z), xi(0) = 0,
// under composition, parametrized by the chart exp(xi) = id + xi.

#include "skam/series.hpp"

#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace skam {

/// Element of the Lie algebra: a Taylor series vanishing at the origin.
class AlgebraElement {
 public:
  AlgebraElement() = default;
  explicit AlgebraElement(Series xi);

  static AlgebraElement zero(int order) { return AlgebraElement(Series::zero_taylor(order)); }

  const Series& series() const { return xi_; }
  int order() const { return xi_.order(); }

  friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
    return AlgebraElement(a.xi_ + b.xi_);
  }
  friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
    return AlgebraElement(a.xi_ - b.xi_);
  }
  friend AlgebraElement operator*(std::complex<double> t, const AlgebraElement& a) { return AlgebraElement(t * a.xi_); }
  friend AlgebraElement operator*(double t, const AlgebraElement& a) { return AlgebraElement(t * a.xi_); }
  friend bool operator==(const AlgebraElement& a, const AlgebraElement& b) { return a.xi_ == b.xi_; }

 private:
  Series xi_ = Series::zero_taylor(0);
};

inline double norm(const AlgebraElement& xi, double s) { return norm(xi.series(), s); }

/// The germ id + displacement; its linear coefficient stays away from 0.
class GroupElement {
 public:
  explicit GroupElement(AlgebraElement displacement);

  static GroupElement identity(int order) { return GroupElement(AlgebraElement::zero(order)); }

  const AlgebraElement& displacement() const { return displacement_; }
  int order() const { return displacement_.order(); }
  /// The map itself, id + displacement.
  Series as_map() const;

 private:
  AlgebraElement displacement_;
};

/// Chart exp(xi) = id + xi. The checked overload enforces the chart domain
/// |xi|_s < 2 at the working scale s.
GroupElement gexp(const AlgebraElement& xi);
GroupElement gexp(const AlgebraElement& xi, double s);
AlgebraElement glog(const GroupElement& g);

/// g h as maps: (g h)(z) = g(h(z)).
GroupElement gmul(const GroupElement& g, const GroupElement& h);
GroupElement ginv(const GroupElement& g);

enum class ProductOrientation {
  composition,  // e^xi e^eta = (id + xi) o (id + eta)
  reversed,     // e^xi e^eta = (id + eta) o (id + xi)
};

struct GroupLawReport {
  double kappa_estimate = 0.0;
  double margin_first = std::numeric_limits<double>::infinity();
  double margin_second = std::numeric_limits<double>::infinity();
  int samples = 0;
  int skipped = 0;
};

/// One-sample check of the two scaled-group inequalities
///
///   |log(e^xi e^eta)|_s            <= |xi|_{s+sigma} + |eta|_s
///   |log(e^xi e^eta) - xi - eta|_s <= kappa sigma^-1 |xi|_{s+2 sigma} |eta|_s
///
/// for xi in B_{s+2 sigma}, eta in sigma B_s. kappa_estimate is this sample's
/// ratio; margin_second is taken against `kappa` (defaults to that ratio).
/// Out-of-domain samples come back with samples = 0, skipped = 1.
GroupLawReport verify_group_law(const AlgebraElement& xi, const AlgebraElement& eta, double s, double sigma,
                                std::optional<double> kappa = std::nullopt,
                                ProductOrientation orientation = ProductOrientation::composition);

struct GroupLawSample {
  AlgebraElement xi;
  AlgebraElement eta;
  ScalePair scale;
};

/// Max-aggregated report over many samples; margin_second is recomputed
/// against the aggregated kappa.
GroupLawReport verify_group_law(std::span<const GroupLawSample> samples,
                                ProductOrientation orientation = ProductOrientation::composition);

void write_group_element(std::ostream& os, const GroupElement& g);
GroupElement read_group_element(std::istream& is);

}  // namespace skam
