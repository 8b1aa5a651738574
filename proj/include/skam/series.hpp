#pragma once

// Truncated Taylor and Fourier series carrying a scale-indexed weighted l1
// norm. These realize the members of a scaled space E = U E_s: a series x
// lies in E_s with |x|_s = sum |c_m| w_m(s), the weights w_m increasing in s.
//
//   Taylor : w_m(s) = s^m            (disc of radius s)
//   Fourier: w_m(s) = exp(2 pi |m| W s)  (strip of half-width W s)

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace skam {

enum class SeriesKind { taylor, fourier };

inline const char* to_string(SeriesKind kind) {
  return kind == SeriesKind::taylor ? "taylor" : "fourier";
}

/// A scale s in the open interval (0, 1).
template <typename Real>
class BasicScaleIndex {
 public:
  explicit BasicScaleIndex(Real s) : s_(s) {
    if (!(s > Real(0) && s < Real(1))) {
      throw std::domain_error("scale index must lie in (0, 1), got " + std::to_string(double(s)));
    }
  }
  Real value() const { return s_; }
  operator Real() const { return s_; }

 private:
  Real s_;
};

using ScaleIndex = BasicScaleIndex<double>;

/// One sample point (s, sigma) of a scale grid; requires 0 < s < s + sigma < 1.
struct ScalePair {
  double s;
  double sigma;
};

inline bool valid(const ScalePair& p, int sigma_multiple = 1) {
  return p.s > 0.0 && p.sigma > 0.0 && p.s + sigma_multiple * p.sigma < 1.0;
}

template <typename Real>
class ScaledSeries {
 public:
  using Scalar = std::complex<Real>;
  using Coefficients = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  ScaledSeries() : ScaledSeries(SeriesKind::taylor, 0, Real(1)) {}

  static ScaledSeries zero_taylor(int order) { return ScaledSeries(SeriesKind::taylor, order, Real(1)); }

  static ScaledSeries zero_fourier(int modes, Real width) {
    if (!(width > Real(0))) throw std::invalid_argument("fourier width factor must be positive");
    return ScaledSeries(SeriesKind::fourier, modes, width);
  }

  static ScaledSeries taylor(Coefficients c) {
    if (c.size() < 1) throw std::invalid_argument("taylor series needs at least one coefficient");
    ScaledSeries x(SeriesKind::taylor, int(c.size()) - 1, Real(1));
    x.coeffs_ = std::move(c);
    return x;
  }

  /// Taylor series from a list of coefficients padded with zeros to `order`.
  static ScaledSeries taylor(int order, std::initializer_list<Scalar> c) {
    if (int(c.size()) > order + 1) throw std::invalid_argument("more coefficients than the truncation order allows");
    ScaledSeries x = zero_taylor(order);
    int m = 0;
    for (const auto& v : c) x.coeffs_[m++] = v;
    return x;
  }

  static ScaledSeries monomial(int order, int m, Scalar value = Scalar(1)) {
    ScaledSeries x = zero_taylor(order);
    x.coeff(m) = value;
    return x;
  }

  static ScaledSeries identity(int order) { return monomial(order, 1); }

  /// The coefficient-basis element e_m of the same shape as `shape`.
  static ScaledSeries basis_like(const ScaledSeries& shape, int m) {
    ScaledSeries x = shape.zero_like();
    x.coeff(m) = Scalar(1);
    return x;
  }

  ScaledSeries zero_like() const { return ScaledSeries(kind_, order_, width_); }

  SeriesKind kind() const { return kind_; }
  int order() const { return order_; }
  Real width() const { return width_; }
  int min_index() const { return kind_ == SeriesKind::taylor ? 0 : -order_; }
  int max_index() const { return order_; }
  Eigen::Index size() const { return coeffs_.size(); }

  const Coefficients& coeffs() const { return coeffs_; }
  Coefficients& coeffs() { return coeffs_; }

  Scalar coeff(int index) const { return coeffs_[slot(index)]; }
  Scalar& coeff(int index) { return coeffs_[slot(index)]; }

  bool same_shape(const ScaledSeries& other) const {
    return kind_ == other.kind_ && order_ == other.order_ && width_ == other.width_;
  }

  Real weight(int index, Real s) const {
    if (kind_ == SeriesKind::taylor) return std::pow(s, Real(index));
    return std::exp(Real(2) * std::numbers::pi_v<Real> * Real(std::abs(index)) * width_ * s);
  }

  Real max_abs_coeff() const { return coeffs_.size() ? coeffs_.cwiseAbs().maxCoeff() : Real(0); }

  ScaledSeries& operator+=(const ScaledSeries& y) {
    require_same_shape(y);
    coeffs_ += y.coeffs_;
    return *this;
  }
  ScaledSeries& operator-=(const ScaledSeries& y) {
    require_same_shape(y);
    coeffs_ -= y.coeffs_;
    return *this;
  }
  ScaledSeries& operator*=(Scalar a) {
    coeffs_ *= a;
    return *this;
  }

  friend ScaledSeries operator+(ScaledSeries x, const ScaledSeries& y) { return x += y; }
  friend ScaledSeries operator-(ScaledSeries x, const ScaledSeries& y) { return x -= y; }
  friend ScaledSeries operator-(ScaledSeries x) {
    x.coeffs_ = -x.coeffs_;
    return x;
  }
  friend ScaledSeries operator*(Scalar a, ScaledSeries x) { return x *= a; }
  friend ScaledSeries operator*(ScaledSeries x, Scalar a) { return x *= a; }
  friend ScaledSeries operator*(Real a, ScaledSeries x) { return x *= Scalar(a); }

  friend bool operator==(const ScaledSeries& x, const ScaledSeries& y) {
    return x.same_shape(y) && x.coeffs_ == y.coeffs_;
  }

  void require_same_shape(const ScaledSeries& y) const {
    if (!same_shape(y)) {
      throw std::invalid_argument(std::string("series shape mismatch: ") + to_string(kind_) + "/" +
                                  std::to_string(order_) + " vs " + to_string(y.kind_) + "/" +
                                  std::to_string(y.order_));
    }
  }

 private:
  ScaledSeries(SeriesKind kind, int order, Real width) : kind_(kind), order_(order), width_(width) {
    if (order < 0) throw std::invalid_argument("truncation order must be nonnegative");
    coeffs_ = Coefficients::Zero(kind == SeriesKind::taylor ? order + 1 : 2 * order + 1);
  }

  Eigen::Index slot(int index) const {
    if (index < min_index() || index > max_index()) {
      throw std::out_of_range("coefficient index " + std::to_string(index) + " outside truncation");
    }
    return kind_ == SeriesKind::taylor ? index : index + order_;
  }

  SeriesKind kind_;
  int order_;
  Real width_;
  Coefficients coeffs_;
};

using Series = ScaledSeries<double>;

// ---------------------------------------------------------------------------
// Norms

template <typename Real>
Real norm(const ScaledSeries<Real>& x, Real s) {
  BasicScaleIndex<Real> checked(s);
  Real total = 0;
  if (x.kind() == SeriesKind::taylor) {
    Real w = 1;
    for (int m = 0; m <= x.order(); ++m) {
      total += std::abs(x.coeff(m)) * w;
      w *= s;
    }
  } else {
    for (int m = -x.order(); m <= x.order(); ++m) total += std::abs(x.coeff(m)) * x.weight(m, s);
  }
  return total;
}

template <typename Real>
Real norm(const ScaledSeries<Real>& x, BasicScaleIndex<Real> s) {
  return norm(x, s.value());
}

/// Ball test x in r B_s.
template <typename Real>
bool in_ball(const ScaledSeries<Real>& x, Real s, Real radius) {
  return norm(x, s) <= radius;
}

/// Weighted size of the top retained coefficient band (the last quarter of
/// the indices); a proxy for what the truncation discards.
template <typename Real>
Real truncation_band(const ScaledSeries<Real>& x, Real s) {
  BasicScaleIndex<Real> checked(s);
  const int first = x.order() - std::max(1, x.order() / 4) + 1;
  Real total = 0;
  for (int m = std::max(first, 0); m <= x.order(); ++m) {
    total += std::abs(x.coeff(m)) * x.weight(m, s);
    if (x.kind() == SeriesKind::fourier && m > 0) total += std::abs(x.coeff(-m)) * x.weight(-m, s);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Products

/// Truncated Cauchy product (Taylor) or truncated convolution (Fourier).
template <typename Real>
ScaledSeries<Real> multiply(const ScaledSeries<Real>& x, const ScaledSeries<Real>& y) {
  x.require_same_shape(y);
  ScaledSeries<Real> out = x.zero_like();
  const int n = x.order();
  if (x.kind() == SeriesKind::taylor) {
    const auto* xp = x.coeffs().data();
    const auto* yp = y.coeffs().data();
    auto* op = out.coeffs().data();
    for (int i = 0; i <= n; ++i) {
      const Real xr = xp[i].real(), xq = xp[i].imag();
      if (xr == Real(0) && xq == Real(0)) continue;
      for (int j = 0; i + j <= n; ++j) {
        const Real yr = yp[j].real(), yq = yp[j].imag();
        op[i + j] += std::complex<Real>(xr * yr - xq * yq, xr * yq + xq * yr);
      }
    }
  } else {
    for (int i = -n; i <= n; ++i) {
      const auto xi = x.coeff(i);
      if (xi == std::complex<Real>(0)) continue;
      for (int j = std::max(-n, -n - i); j <= std::min(n, n - i); ++j) out.coeff(i + j) += xi * y.coeff(j);
    }
  }
  return out;
}

template <typename Real>
ScaledSeries<Real> operator*(const ScaledSeries<Real>& x, const ScaledSeries<Real>& y) {
  return multiply(x, y);
}

inline constexpr double kInvertibilityThreshold = 1e-8;

/// Multiplicative inverse of a Taylor series with a unit constant term.
template <typename Real>
ScaledSeries<Real> reciprocal(const ScaledSeries<Real>& x, Real threshold = Real(kInvertibilityThreshold)) {
  if (x.kind() != SeriesKind::taylor) throw std::invalid_argument("reciprocal: taylor series required");
  if (std::abs(x.coeff(0)) < threshold) throw std::domain_error("reciprocal: constant coefficient is not a unit");
  ScaledSeries<Real> r = x.zero_like();
  const auto inv0 = std::complex<Real>(1) / x.coeff(0);
  r.coeff(0) = inv0;
  for (int n = 1; n <= x.order(); ++n) {
    std::complex<Real> acc = 0;
    for (int i = 1; i <= n; ++i) acc += x.coeff(i) * r.coeff(n - i);
    r.coeff(n) = -acc * inv0;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Calculus and composition on Taylor series

/// Termwise derivative, kept at the same truncation order (top coefficient 0).
template <typename Real>
ScaledSeries<Real> differentiate(const ScaledSeries<Real>& x) {
  if (x.kind() != SeriesKind::taylor) throw std::invalid_argument("differentiate: taylor series required");
  ScaledSeries<Real> d = x.zero_like();
  for (int m = 1; m <= x.order(); ++m) d.coeff(m - 1) = Real(m) * x.coeff(m);
  return d;
}

/// Truncated composition x o h by Horner's scheme. Requires h(0) = 0.
template <typename Real>
ScaledSeries<Real> compose(const ScaledSeries<Real>& x, const ScaledSeries<Real>& h) {
  if (x.kind() != SeriesKind::taylor || h.kind() != SeriesKind::taylor) {
    throw std::invalid_argument("compose: taylor series required");
  }
  x.require_same_shape(h);
  if (h.coeff(0) != std::complex<Real>(0)) throw std::domain_error("compose: inner series must vanish at 0");
  ScaledSeries<Real> acc = x.zero_like();
  for (int m = x.order(); m >= 0; --m) {
    acc = multiply(acc, h);
    acc.coeff(0) += x.coeff(m);
  }
  return acc;
}

/// Compositional inverse r of h (h o r = r o h = id mod z^{D+1}) by Newton
/// iteration r <- r - (h o r - id) / (h' o r).
template <typename Real>
ScaledSeries<Real> reversion(const ScaledSeries<Real>& h, Real threshold = Real(kInvertibilityThreshold)) {
  if (h.kind() != SeriesKind::taylor) throw std::invalid_argument("reversion: taylor series required");
  if (h.coeff(0) != std::complex<Real>(0)) throw std::domain_error("reversion: series must vanish at 0");
  if (h.order() < 1 || std::abs(h.coeff(1)) < threshold) {
    throw std::domain_error("reversion: linear coefficient vanishes, germ is not invertible");
  }
  const int n = h.order();
  const auto id = ScaledSeries<Real>::identity(n);
  const auto dh = differentiate(h);
  ScaledSeries<Real> r = ScaledSeries<Real>::monomial(n, 1, std::complex<Real>(1) / h.coeff(1));

  int max_steps = 4;
  for (int p = 1; p < n + 1; p *= 2) ++max_steps;
  for (int step = 0; step < max_steps; ++step) {
    const auto defect = compose(h, r) - id;
    if (defect.max_abs_coeff() == Real(0)) break;
    const auto correction = multiply(defect, reciprocal(compose(dh, r), threshold));
    r -= correction;
    if (correction.max_abs_coeff() <= std::numeric_limits<Real>::epsilon() * r.max_abs_coeff()) break;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Plain-text serialization
//
//   kind=taylor order=D [extra header keys]
//   index re im        (one line per coefficient, 17 significant digits)

namespace detail {
inline std::string sci17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}
}  // namespace detail

inline void write_series(std::ostream& os, const Series& x, const std::string& extra_header = {}) {
  os << "kind=" << to_string(x.kind()) << " order=" << x.order();
  if (x.kind() == SeriesKind::fourier) os << " width=" << detail::sci17(x.width());
  if (!extra_header.empty()) os << ' ' << extra_header;
  os << '\n';
  for (int m = x.min_index(); m <= x.max_index(); ++m) {
    os << m << ' ' << detail::sci17(x.coeff(m).real()) << ' ' << detail::sci17(x.coeff(m).imag()) << '\n';
  }
}

struct SeriesHeader {
  SeriesKind kind = SeriesKind::taylor;
  int order = 0;
  double width = 1.0;
  bool group = false;
};

inline SeriesHeader parse_series_header(const std::string& line) {
  SeriesHeader h;
  bool have_kind = false, have_order = false;
  std::istringstream in(line);
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw std::runtime_error("series header: malformed token '" + token + "'");
    const auto key = token.substr(0, eq);
    const auto val = token.substr(eq + 1);
    if (key == "kind") {
      if (val == "taylor") h.kind = SeriesKind::taylor;
      else if (val == "fourier") h.kind = SeriesKind::fourier;
      else throw std::runtime_error("series header: unknown kind '" + val + "'");
      have_kind = true;
    } else if (key == "order") {
      h.order = std::stoi(val);
      have_order = true;
    } else if (key == "width") {
      h.width = std::stod(val);
    } else if (key == "group") {
      h.group = val == "1";
    }
  }
  if (!have_kind || !have_order) throw std::runtime_error("series header: kind and order are required");
  return h;
}

inline Series read_series(std::istream& is, SeriesHeader* header_out = nullptr) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("series: empty input");
  const auto h = parse_series_header(line);
  if (header_out) *header_out = h;
  Series x = h.kind == SeriesKind::taylor ? Series::zero_taylor(h.order) : Series::zero_fourier(h.order, h.width);
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    int index;
    std::string re, im;
    if (!(row >> index >> re >> im)) throw std::runtime_error("series: malformed coefficient line '" + line + "'");
    x.coeff(index) = {std::strtod(re.c_str(), nullptr), std::strtod(im.c_str(), nullptr)};
  }
  return x;
}

}  // namespace skam
