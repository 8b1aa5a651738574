#include <doctest.h>

#include "skam/instances.hpp"
#include "skam/random.hpp"
#include "skam/solver.hpp"

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

const ActionInstance& germ32() {
  static const ActionInstance inst = build_germ_instance(GermActionSpec::identity(32));
  return inst;
}

}  // namespace

TEST_CASE("epsilon closed form") {
  CHECK(epsilon_closed_form(0, 1, 1, 0.5) == doctest::Approx(9.765625e-4).epsilon(1e-15));
  CHECK(epsilon_closed_form(0, 1, 1, 1.0) == doctest::Approx(1.0 / 256).epsilon(1e-15));
  CHECK(epsilon_closed_form(1, 2, 1, 0.5) == doctest::Approx(0.0625 / 32768).epsilon(1e-15));
  CHECK_THROWS(epsilon_closed_form(0, 0.5, 1, 0.5));
  CHECK_THROWS(epsilon_closed_form(0, 1, 1, 5.0));
}

TEST_CASE("epsilon product") {
  CHECK(epsilon_product(0, 1, 1, 0.5, 1) == doctest::Approx(0.03125).epsilon(1e-14));
  CHECK(std::abs(epsilon_product(0, 1, 1, 0.5, 60) / epsilon_closed_form(0, 1, 1, 0.5) - 1) <= 1e-10);
  // Partial products approach the limit monotonically in log space.
  const double target = std::log(epsilon_closed_form(1, 2, 3, 0.3));
  double prev = std::numeric_limits<double>::infinity();
  for (int t = 1; t <= 30; ++t) {
    const double gap = std::abs(std::log(epsilon_product(1, 2, 3, 0.3, t)) - target);
    CHECK(gap <= prev);
    prev = gap;
  }
  CHECK_THROWS(epsilon_product(0, 1, 1, 0.5, 0));
}

TEST_CASE("mu") {
  for (int k : {0, 1}) {
    const double c = 1.5, Nj = 2.0, delta = 0.5;
    for (int n = 1; n <= 6; ++n) {
      const double sigma_n = std::ldexp(delta, -(n + 2));
      const double factor = c * Nj * std::pow(sigma_n, -k - 1);
      const double lhs = std::pow(mu(n - 1, k, c, Nj, delta), std::ldexp(1.0, n));
      const double rhs = std::pow(mu(n, k, c, Nj, delta), std::ldexp(1.0, n)) / factor;
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
    const double sigma0 = delta / 4;
    const double eps = epsilon_closed_form(k, c, Nj, delta);
    CHECK(Nj * std::pow(sigma0, -k) * eps == doctest::Approx(delta / 16 * mu(0, k, c, Nj, delta)).epsilon(1e-10));
  }
  double prev = 0.0;
  for (int n = 0; n < 12; ++n) {
    const double m = mu(n, 0, 1, 1, 0.5);
    CHECK(m <= 1.0);
    CHECK(m > prev);
    prev = m;
  }
  CHECK(mu(20, 0, 1, 1, 0.5) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("g sequence") {
  CHECK(g_sequence(0) == 0.0625);
  CHECK(g_sequence(1) == 0.12890625);
  double prev = 0.0;
  for (int n = 0; n <= 30; ++n) {
    const double g = g_sequence(n);
    CHECK(g >= prev);
    CHECK(g < 1.0);
    prev = g;
  }
  // 1 + g_n = (17/16) prod_{m=1..n} (1 + 4^{-2^m}), and prod_{m>=1} (1 + 4^{-2^m}) = 16/15.
  CHECK(g_sequence(30) == doctest::Approx(2.0 / 15.0).epsilon(1e-15));
  CHECK_THROWS(g_sequence(-1));
}

TEST_CASE("schedule arithmetic holds exactly") {
  const auto r = verify_preliminary_remark(0.5, 1);
  REQUIRE(r.checks.size() == 2);
  CHECK(r.passed());
  for (int i = 1; i <= 99; ++i) {
    const double delta = i / 100.0;
    CHECK(verify_preliminary_remark(delta, 10).passed());
    CHECK(verify_sigma_ratio(delta, 10).passed());
  }
  CHECK(verify_preliminary_remark(0.99, 10).failures() == 0);
}

TEST_CASE("schedule and delta checks") {
  const Schedule sch(0.9, 0.5, 10);
  CHECK(sch.sigma(0) == 0.125);
  CHECK(sch.scale(0) == 0.9);
  CHECK(sch.scale(1) == doctest::Approx(0.65));
  CHECK(sch.scale(11) > sch.limit());
  CHECK(sch.scale(11) == doctest::Approx(0.4 + 0.5 * std::ldexp(1.0, -11)));
  CHECK_THROWS(check_delta(0.4, 0.5, {}));
  CHECK_THROWS(check_delta(0.9, 0.0, {}));
  CHECK_NOTHROW(check_delta(0.9, 0.5, {}));
}

TEST_CASE("solve x = 0") {
  const auto r = solve(germ32(), Series::zero_taylor(32));
  CHECK(r.status == SolveStatus::converged);
  CHECK(r.iterations == 0);
  CHECK(r.residual == 0.0);
  CHECK(r.g.as_map() == Series::identity(32));
  CHECK_THROWS_AS(quadratic_rate(r.trace), std::invalid_argument);
}

TEST_CASE("solve linear input") {
  const double c = 1e-4;
  const auto r = solve(germ32(), poly({0, c}, 32));
  REQUIRE(r.status == SolveStatus::converged);
  CHECK(std::abs(r.g.as_map().coeff(1) - 1.0 / (1.0 + c)) <= 1e-10);
  CHECK(r.g.displacement().series().max_abs_coeff() - std::abs(r.g.as_map().coeff(1) - 1.0) <= 1e-10);
}

TEST_CASE("solve matches the reversion oracle") {
  const Series x = poly({0, 1e-4, 0.5e-4, 0.25e-4}, 32);
  const auto r = solve(germ32(), x);
  REQUIRE(r.status == SolveStatus::converged);
  CHECK(r.certificates.passed());
  CHECK((r.g.as_map() - reversion_oracle(x).as_map()).max_abs_coeff() <= 1e-10);
  CHECK(r.residual <= 1e-10);
}

TEST_CASE("seeded solves pass every certificate") {
  const auto& inst = germ32();
  const SolveConfig cfg;
  const double eps = certified_epsilon(inst, cfg);
  SplitMix64 root(1);
  std::vector<IterationTrace> traces;
  for (int i = 0; i < 10; ++i) {
    SplitMix64 rng = root.fork(i);
    const Series x = random_series(rng, inst.origin, cfg.s, 0.5 * eps);
    const auto r = solve(inst, x, cfg);
    CHECK(r.status == SolveStatus::converged);
    CHECK(r.certificates.passed());
    CHECK(r.certified_input);
    for (const auto& row : r.trace) {
      CHECK(row.xi_norm <= row.sharp_bound + 1e-10);
      CHECK(row.gamma_norm <= row.g_n);
      CHECK(row.cauchy_inc <= row.lemma3_bound);
    }
    traces.push_back(r.trace);
  }
  const double rate = quadratic_rate(traces);
  CHECK(rate >= 1.7);
  CHECK(rate <= 2.3);
}

TEST_CASE("input outside the certified ball is never reported as converged") {
  const auto& inst = germ32();
  const SolveConfig cfg;
  SplitMix64 rng(2);
  const Series x = random_series(rng, inst.origin, cfg.s, 50 * certified_epsilon(inst, cfg));
  const auto r = solve(inst, x, cfg);
  CHECK(r.status != SolveStatus::converged);
  CHECK_FALSE(r.certified_input);
  CHECK_FALSE(r.reason.empty());
}

TEST_CASE("quadratic rate of a linearly convergent trace is near one") {
  IterationTrace trace;
  double v = 1e-3;
  for (int n = 0; n < 8; ++n, v *= 0.5) {
    IterationRow row;
    row.n = n;
    row.xi_norm = v;
    trace.push_back(row);
  }
  const double rate = quadratic_rate(trace);
  CHECK(rate > 1.0);
  CHECK(rate < 1.15);
}

TEST_CASE("trace csv") {
  const auto r = solve(germ32(), poly({0, 1e-5}, 32));
  std::ostringstream os;
  write_trace_csv(os, r.trace);
  const std::string text = os.str();
  CHECK(text.rfind("n,s_n,sigma_n,xi_norm,lemma1_bound,mu_n,gamma_norm,g_n,x_norm,cauchy_inc,lemma3_bound\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == int(r.trace.size()) + 1);
}
