#pragma once

// Seeded sampling of test series. The generator is SplitMix64 so that a fixed
// seed produces the same stream on every platform (std distributions do not
// guarantee that).

#include "skam/series.hpp"

#include <cstdint>

namespace skam {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Independent stream for sub-task `index` (sweep point, sample id).
  SplitMix64 fork(std::uint64_t index) const {
    SplitMix64 mixer(state_ ^ (0xd1b54a32d192ed03ULL * (index + 1)));
    return SplitMix64(mixer.next());
  }

 private:
  std::uint64_t state_;
};

struct RandomSeriesOptions {
  double decay = 0.5;          // |c_m| <= decay^|m| before rescaling
  bool zero_constant = true;   // c_0 = 0 (germs vanishing at the origin, zero-mean Fourier)
  bool real_coefficients = false;
};

/// Random series shaped like `shape`, rescaled so that |x|_scale = target_norm
/// (unless the draw is identically zero).
inline Series random_series(SplitMix64& rng, const Series& shape, double scale, double target_norm,
                            const RandomSeriesOptions& opt = {}) {
  Series x = shape.zero_like();
  for (int m = x.min_index(); m <= x.max_index(); ++m) {
    const double envelope = std::pow(opt.decay, std::abs(m));
    const double re = rng.uniform(-1.0, 1.0);
    const double im = opt.real_coefficients ? 0.0 : rng.uniform(-1.0, 1.0);
    if (m == 0 && opt.zero_constant) continue;
    x.coeff(m) = envelope * std::complex<double>(re, im);
  }
  const double n = norm(x, scale);
  if (n > 0.0) x *= std::complex<double>(target_norm / n);
  return x;
}

/// Restrict `x` to a lower truncation order (drop the higher coefficients).
inline Series truncate_to(const Series& x, int order) {
  if (x.kind() != SeriesKind::taylor) throw std::invalid_argument("truncate_to: taylor series required");
  if (order > x.order()) throw std::invalid_argument("truncate_to: cannot raise the order");
  return Series::taylor(Series::Coefficients(x.coeffs().head(order + 1)));
}

}  // namespace skam
