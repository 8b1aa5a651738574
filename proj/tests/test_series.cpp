#include <doctest.h>

#include "skam/random.hpp"
#include "skam/series.hpp"

#include <sstream>

using namespace skam;
using C = std::complex<double>;

namespace {

Series poly(std::initializer_list<C> c, int order) {
  Series x = Series::zero_taylor(order);
  int m = 0;
  for (auto v : c) x.coeff(m++) = v;
  return x;
}

void check_coeffs(const Series& x, std::initializer_list<double> expected, double tol = 1e-14) {
  int m = 0;
  for (double v : expected) {
    CAPTURE(m);
    CHECK(std::abs(x.coeff(m) - C(v)) <= tol);
    ++m;
  }
}

// Lagrange inversion of h(z) = z + b z^2: [z^n] h^-1 = (-b)^{n-1} Catalan(n-1).
double catalan(int n) {
  double c = 1.0;
  for (int i = 0; i < n; ++i) c = c * 2.0 * (2 * i + 1) / (i + 2);
  return c;
}

}  // namespace

TEST_CASE("scale index rejects values outside (0, 1)") {
  CHECK_THROWS_AS(ScaleIndex(0.0), std::domain_error);
  CHECK_THROWS_AS(ScaleIndex(1.0), std::domain_error);
  CHECK_THROWS_AS(ScaleIndex(-0.2), std::domain_error);
  CHECK(ScaleIndex(0.4).value() == 0.4);
}

TEST_CASE("taylor norm is the weighted coefficient sum") {
  const Series x = poly({0, 2, 3}, 4);
  CHECK(norm(x, 0.5) == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(norm(Series::zero_taylor(8), 0.7) == 0.0);
  const Series z5 = Series::monomial(8, 5);
  CHECK(norm(z5, 0.3) == doctest::Approx(std::pow(0.3, 5)));
  CHECK(norm(z5, 0.3) <= norm(z5, 0.6));
}

TEST_CASE("fourier norm uses exponential weights") {
  Series x = Series::zero_fourier(4, 1.0);
  x.coeff(-2) = 1.0;
  x.coeff(3) = C(0, 2);
  const double s = 0.1;
  const double expected = std::exp(2 * std::numbers::pi * 2 * s) + 2 * std::exp(2 * std::numbers::pi * 3 * s);
  CHECK(norm(x, s) == doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS(x.coeff(5));
  CHECK_THROWS_AS(Series::zero_fourier(4, 0.0), std::invalid_argument);
}

TEST_CASE("norm requires a valid scale") {
  CHECK_THROWS_AS(norm(Series::identity(4), 1.2), std::domain_error);
}

TEST_CASE("multiply") {
  check_coeffs(multiply(poly({1, 1}, 4), poly({1, -1}, 4)), {1, 0, -1, 0, 0});
  check_coeffs(multiply(poly({0, 1, 1}, 4), poly({0, 1, 1}, 4)), {0, 0, 1, 2, 1});
  CHECK(multiply(poly({1, 2, 3}, 4), Series::zero_taylor(4)) == Series::zero_taylor(4));
  CHECK_THROWS(multiply(Series::identity(4), Series::identity(5)));
}

TEST_CASE("fourier multiply is a truncated convolution") {
  Series a = Series::zero_fourier(3, 1.0), b = Series::zero_fourier(3, 1.0);
  a.coeff(1) = 2.0;
  a.coeff(-1) = 1.0;
  b.coeff(2) = 3.0;
  const Series p = multiply(a, b);
  CHECK(p.coeff(3) == C(6.0));
  CHECK(p.coeff(1) == C(3.0));
  CHECK(p.coeff(0) == C(0.0));
}

TEST_CASE("norm is submultiplicative on taylor series") {
  SplitMix64 rng(7);
  const Series shape = Series::zero_taylor(16);
  for (int i = 0; i < 20; ++i) {
    RandomSeriesOptions opt;
    opt.zero_constant = false;
    const Series x = random_series(rng, shape, 0.5, 1.0, opt), y = random_series(rng, shape, 0.5, 1.0, opt);
    for (double s : {0.2, 0.5, 0.8}) CHECK(norm(multiply(x, y), s) <= norm(x, s) * norm(y, s) * (1 + 1e-14));
  }
}

TEST_CASE("compose") {
  check_coeffs(compose(poly({0, 0, 1}, 4), poly({0, 1, 1}, 4)), {0, 0, 1, 2, 1});
  const Series x = poly({0.5, -1, 2, 0.25, 3}, 4);
  CHECK(compose(x, Series::identity(4)) == x);
  CHECK_THROWS_AS(compose(x, poly({0.1, 1}, 4)), std::domain_error);
}

TEST_CASE("reciprocal") {
  const Series r = reciprocal(poly({1, 0.6}, 8));
  for (int m = 0; m <= 8; ++m) CHECK(std::abs(r.coeff(m) - std::pow(-0.6, m)) < 1e-15);
  CHECK_THROWS(reciprocal(poly({0, 1}, 4)));
}

TEST_CASE("differentiate") {
  check_coeffs(differentiate(poly({0, 0, 0, 1}, 4)), {0, 0, 3, 0, 0});
  CHECK(differentiate(poly({4.5}, 4)) == Series::zero_taylor(4));
}

TEST_CASE("reversion matches the Lagrange inversion oracle") {
  check_coeffs(reversion(poly({0, 1, 1}, 4)), {0, 1, -1, 2, -5});
  CHECK(reversion(Series::identity(6)) == Series::identity(6));
  const double c = 1e-4;
  check_coeffs(reversion(poly({0, 1 + c}, 4)), {0, 1 / (1 + c), 0, 0, 0}, 1e-16);

  for (double b : {0.3, -0.05, 1e-2}) {
    const int D = 20;
    const Series r = reversion(poly({0, 1, b}, D));
    for (int n = 1; n <= D; ++n) {
      const double expected = std::pow(-b, n - 1) * catalan(n - 1);
      CAPTURE(n);
      CHECK(std::abs(r.coeff(n) - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST_CASE("reversion is a two-sided inverse on truncations") {
  SplitMix64 rng(11);
  const Series id = Series::identity(24);
  for (int i = 0; i < 10; ++i) {
    const Series h = id + random_series(rng, id, 0.5, 0.2);
    const Series r = reversion(h);
    CHECK(norm(compose(h, r) - id, 0.5) < 1e-13);
    CHECK(norm(compose(r, h) - id, 0.5) < 1e-13);
  }
}

TEST_CASE("series file round trip") {
  SplitMix64 rng(3);
  const Series x = random_series(rng, Series::zero_taylor(12), 0.5, 1.0);
  std::stringstream ss;
  write_series(ss, x);
  CHECK(read_series(ss) == x);

  Series f = Series::zero_fourier(5, 0.5);
  f.coeff(-5) = C(1e-310, -2);
  f.coeff(4) = C(0.1, 0.2);
  std::stringstream fs;
  write_series(fs, f);
  const Series g = read_series(fs);
  CHECK(g == f);
  CHECK(g.width() == 0.5);
}

TEST_CASE("malformed series files throw") {
  std::istringstream bad_kind("kind=laurent order=3\n");
  CHECK_THROWS(read_series(bad_kind));
  std::istringstream bad_index("kind=taylor order=2\n5 1 0\n");
  CHECK_THROWS(read_series(bad_index));
}

TEST_CASE("float instantiation of the series core") {
  using SeriesF = ScaledSeries<float>;
  SeriesF x = SeriesF::zero_taylor(3);
  x.coeff(1) = 2.0f;
  x.coeff(2) = 3.0f;
  CHECK(norm(x, 0.5f) == doctest::Approx(1.75f));
}
