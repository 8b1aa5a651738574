#pragma once

// k-bounded operator norms
//
//   N(u) = sup_{s, sigma, x} sigma^k |u(x)|_s / |x|_{s+sigma}
//
// For a weighted l1 source norm the supremum over x is attained on the
// coefficient basis, so N is exact on any finite (s, sigma) grid.

#include "skam/random.hpp"
#include "skam/series.hpp"

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace skam {

struct BoundedOperatorEstimate {
  int k = 0;
  double N = 0.0;
  std::vector<ScalePair> grid;
  // Location of the supremum.
  ScalePair argmax{0.0, 0.0};
  int argmax_index = 0;
};

using LinearMap = std::function<Series(const Series&)>;

class LinearityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OperatorNormOptions {
  /// Basis indices spanning the operator's domain; empty means every index.
  std::vector<int> basis;
  int linearity_pairs = 8;
  double linearity_tol = 1e-12;
  std::uint64_t seed = 0x5eed;
};

/// Random check that u(a x + b y) = a u(x) + b u(y), relative to the sizes of
/// the terms, at the scale `s`.
inline void verify_linearity(const LinearMap& u, const Series& shape, const std::vector<int>& basis, double s,
                             int pairs, double tol, std::uint64_t seed) {
  SplitMix64 rng(seed);
  auto draw = [&] {
    Series x = shape.zero_like();
    for (int m : basis) x.coeff(m) = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    return x;
  };
  for (int i = 0; i < pairs; ++i) {
    const Series x = draw(), y = draw();
    const std::complex<double> a(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const std::complex<double> b(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const Series ux = u(x), uy = u(y);
    const Series lhs = u(a * x + b * y);
    const Series rhs = a * ux + b * uy;
    const double scale = std::abs(a) * norm(ux, s) + std::abs(b) * norm(uy, s);
    const double defect = norm(lhs - rhs, s);
    if (defect > tol * std::max(scale, 1e-300)) {
      throw LinearityError("operator failed the linearity check (defect " + std::to_string(defect) + ")");
    }
  }
}

inline BoundedOperatorEstimate measure_operator_norm(const LinearMap& u, const Series& shape, int k,
                                                     std::span<const ScalePair> grid,
                                                     const OperatorNormOptions& opt = {}) {
  if (k < 0) throw std::invalid_argument("loss exponent k must be nonnegative");
  if (grid.empty()) throw std::invalid_argument("operator norm grid is empty");
  for (const auto& p : grid) {
    if (!valid(p)) throw std::domain_error("grid point violates 0 < s < s + sigma < 1");
  }

  std::vector<int> basis = opt.basis;
  if (basis.empty()) {
    for (int m = shape.min_index(); m <= shape.max_index(); ++m) basis.push_back(m);
  }
  verify_linearity(u, shape, basis, grid.front().s, opt.linearity_pairs, opt.linearity_tol, opt.seed);

  BoundedOperatorEstimate est;
  est.k = k;
  est.grid.assign(grid.begin(), grid.end());
  for (int m : basis) {
    const Series image = u(Series::basis_like(shape, m));
    for (const auto& p : grid) {
      const double ratio = std::pow(p.sigma, k) * norm(image, p.s) / shape.weight(m, p.s + p.sigma);
      if (ratio > est.N) {
        est.N = ratio;
        est.argmax = p;
        est.argmax_index = m;
      }
    }
  }
  return est;
}

/// Cartesian grid {(s, sigma)} keeping only points with s + sigma < 1.
inline std::vector<ScalePair> make_grid(std::span<const double> scales, std::span<const double> sigmas,
                                        int sigma_multiple = 1) {
  std::vector<ScalePair> grid;
  for (double s : scales) {
    for (double sg : sigmas) {
      ScalePair p{s, sg};
      if (valid(p, sigma_multiple)) grid.push_back(p);
    }
  }
  return grid;
}

}  // namespace skam
