#include "skam/commands.hpp"

#include "skam/random.hpp"
#include "skam/reports.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

namespace skam {

namespace fs = std::filesystem;

namespace {

using detail::sci17;

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream os(dir / name);
  if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
  return os;
}

void write_json(const fs::path& dir, const std::string& name, const nlohmann::json& doc) {
  auto os = open_out(dir, name);
  os << doc.dump(2) << '\n';
}

std::vector<double> logspace(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / (count - 1)));
  return out;
}

std::string rate_text(const IterationTrace& trace) {
  try {
    return sci17(quadratic_rate(trace));
  } catch (const std::invalid_argument&) {
    return "nan";
  }
}

bool is_identity_base(const RunConfig& cfg) {
  const auto spec = cfg.germ_spec();
  return spec.a == Series::identity(spec.order());
}

Series input_series(const RunConfig& cfg, const ActionInstance& inst, double eps, std::uint64_t stream) {
  if (!cfg.input.empty()) {
    std::ifstream in(cfg.input);
    if (!in) throw std::runtime_error("cannot open input series '" + cfg.input + "'");
    return read_series(in);
  }
  SplitMix64 rng = SplitMix64(cfg.seed).fork(stream);
  return random_series(rng, inst.origin, cfg.solver.s, cfg.fraction * eps);
}

constexpr double kLawTolerance = 1e-10;
constexpr double kKappaStability = 0.10;
constexpr double kSlopeTarget = 2.0;
constexpr double kSlopeTolerance = 0.05;
constexpr int kSlopeSamples = 20;
constexpr double kOracleTolerance = 1e-10;
constexpr double kEpsilonTolerance = 1e-10;
constexpr int kEpsilonTerms = 60;

}  // namespace

double max_coeff_error(const Series& a, const Series& b) { return (a - b).max_abs_coeff(); }

int cmd_run(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  const auto inst = build_germ_instance(cfg.germ_spec());
  const double eps = certified_epsilon(inst, cfg.solver);
  const Series x = input_series(cfg, inst, eps, 0);
  const auto result = solve(inst, x, cfg.solver);

  {
    auto os = open_out(out_dir, "trace.csv");
    write_trace_csv(os, result.trace);
  }
  {
    auto os = open_out(out_dir, "g.series");
    write_group_element(os, result.g);
  }
  auto doc = summary_json(result, cfg.solver);
  doc["measured_constants"] = to_json(inst.measured);
  write_json(out_dir, "result.json", doc);

  log << "status=" << to_string(result.status) << " iterations=" << result.iterations
      << " residual=" << sci17(result.residual) << " eps=" << sci17(result.epsilon)
      << " |x|=" << sci17(result.input_norm);
  if (!result.reason.empty()) log << " reason=\"" << result.reason << '"';
  log << '\n';
  return result.status == SolveStatus::converged && result.certificates.passed() ? 0 : 1;
}

int cmd_verify_group(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  const MeasurementConfig mc;
  const auto grid = make_grid(mc.scales, mc.sigmas, 2);
  const int lo = cfg.trunc, hi = 2 * cfg.trunc;
  // Samples are drawn at the doubled order and truncated, so both runs see
  // the same low-order coefficients.
  const auto wide = group_law_samples(hi, grid, cfg.samples, cfg.seed);
  std::vector<GroupLawSample> narrow;
  narrow.reserve(wide.size());
  for (const auto& smp : wide) {
    narrow.push_back({AlgebraElement(truncate_to(smp.xi.series(), lo)), AlgebraElement(truncate_to(smp.eta.series(), lo)),
                      smp.scale});
  }
  const auto r_lo = verify_group_law(narrow, cfg.orientation);
  const auto r_hi = verify_group_law(wide, cfg.orientation);
  const double change = std::abs(r_hi.kappa_estimate - r_lo.kappa_estimate) / r_lo.kappa_estimate;
  const bool ok = r_lo.margin_first >= -kLawTolerance && r_hi.margin_first >= -kLawTolerance &&
                  std::isfinite(r_lo.kappa_estimate) && change < kKappaStability;

  write_json(out_dir, "group_law.json",
             {{"orientation", cfg.orientation == ProductOrientation::composition ? "composition" : "reversed"},
              {"order", lo},
              {"report", to_json(r_lo)},
              {"doubled_order", hi},
              {"doubled_report", to_json(r_hi)},
              {"kappa_relative_change", change},
              {"grid", to_json(std::span<const ScalePair>(grid))},
              {"passed", ok}});
  log << "kappa(D=" << lo << ")=" << sci17(r_lo.kappa_estimate) << " kappa(D=" << hi << ")=" << sci17(r_hi.kappa_estimate)
      << " margin_first=" << sci17(std::min(r_lo.margin_first, r_hi.margin_first)) << (ok ? " PASS" : " FAIL") << '\n';
  return ok ? 0 : 1;
}

int cmd_verify_ac(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  const auto inst = make_germ_action(cfg.germ_spec(), {});
  const MeasurementConfig mc;
  const auto grid = make_grid(mc.scales, mc.sigmas, 2);

  AcReport report;
  const SplitMix64 root(cfg.seed);
  for (int i = 0; i < cfg.samples; ++i) {
    const ScalePair p = grid[std::size_t(i) % grid.size()];
    SplitMix64 rng = root.fork(std::uint64_t(i));
    const double u = rng.uniform(0.05, 1.0);
    const AlgebraElement xi(random_series(rng, inst.origin, p.s + 2.0 * p.sigma, u * p.sigma));
    const ScalePair one[] = {p};
    report = merge(report, verify_ac(inst, std::span<const AlgebraElement>(&xi, 1), one));
  }

  // Quadratic scaling of the (A_c) left side under xi -> t xi.
  const double s = 0.5, sigma = 0.1;
  const auto ts = logspace(1e-3, 1e-1, 9);
  std::vector<double> slopes;
  bool ok = true;
  const SplitMix64 slope_root(cfg.seed ^ 0xa5a5a5a5ULL);
  for (int i = 0; i < kSlopeSamples; ++i) {
    SplitMix64 rng = slope_root.fork(std::uint64_t(i));
    const AlgebraElement xi(random_series(rng, inst.origin, s + 2.0 * sigma, sigma));
    const double slope = ac_scaling_slope(inst, xi, s, ts);
    slopes.push_back(slope);
    ok = ok && std::abs(slope - kSlopeTarget) <= kSlopeTolerance;
  }
  write_json(out_dir, "ac.json",
             {{"report", to_json(report)},
              {"grid", to_json(std::span<const ScalePair>(grid))},
              {"scaling", {{"s", s}, {"t", ts}, {"slopes", slopes}}},
              {"passed", ok}});
  log << "c_estimate=" << sci17(report.c_estimate) << " max_ratio=" << sci17(report.max_ratio)
      << " slopes in [" << sci17(*std::min_element(slopes.begin(), slopes.end())) << ", "
      << sci17(*std::max_element(slopes.begin(), slopes.end())) << "]" << (ok ? " PASS" : " FAIL") << '\n';
  return ok ? 0 : 1;
}

int cmd_measure_j(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  if (cfg.diophantine) {
    const double scales[] = {0.2, 0.4, 0.6, 0.8};
    const auto sigmas = dyadic_sigmas(0.16, 14);
    const auto grid = make_grid(scales, sigmas);
    const auto scan = select_loss_exponent(*cfg.diophantine, cfg.measure_modes, grid, cfg.measure_k_max);
    {
      auto os = open_out(out_dir, "measure_j.csv");
      os << "k,modes,N\n";
      for (std::size_t k = 0; k < scan.norms.size(); ++k) {
        for (std::size_t i = 0; i < scan.modes.size(); ++i) {
          os << k << ',' << scan.modes[i] << ',' << sci17(scan.norms[k][i]) << '\n';
        }
      }
    }
    write_json(out_dir, "measure_j.json",
               {{"operator", "cohomological"},
                {"alpha", cfg.diophantine->alpha},
                {"margin", diophantine_margin(*cfg.diophantine)},
                {"modes", scan.modes},
                {"norms", scan.norms},
                {"selected_k", scan.k}});
    log << "selected k=" << scan.k << '\n';
    return scan.k >= 0 ? 0 : 1;
  }
  const auto inst = make_germ_action(cfg.germ_spec(), {});
  const MeasurementConfig mc;
  const auto grid = make_grid(mc.scales, mc.sigmas);
  const auto est = measure_operator_norm(inst.right_inverse, inst.origin, 0, grid);
  write_json(out_dir, "measure_j.json", {{"operator", "germ"}, {"estimate", to_json(est)}});
  log << "N(j)=" << sci17(est.N) << " (k=0)\n";
  return 0;
}

int cmd_oracle_compare(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  if (!is_identity_base(cfg)) throw std::runtime_error("oracle-compare requires the a = id germ instance");
  const auto inst = build_germ_instance(cfg.germ_spec());
  const double eps = certified_epsilon(inst, cfg.solver);
  auto os = open_out(out_dir, "oracle_compare.csv");
  os << "sample,status,iterations,residual,max_coeff_err,rate\n";
  int failures = 0;
  double worst = 0.0;
  for (int i = 0; i < cfg.samples; ++i) {
    SplitMix64 rng = SplitMix64(cfg.seed).fork(std::uint64_t(i));
    const Series x = random_series(rng, inst.origin, cfg.solver.s, cfg.fraction * eps);
    const auto result = solve(inst, x, cfg.solver);
    const double err =
        max_coeff_error(glog(result.g).series(), glog(reversion_oracle(x)).series());
    worst = std::max(worst, err);
    const bool ok = result.status == SolveStatus::converged && err <= kOracleTolerance;
    failures += ok ? 0 : 1;
    os << i << ',' << to_string(result.status) << ',' << result.iterations << ',' << sci17(result.residual) << ','
       << sci17(err) << ',' << rate_text(result.trace) << '\n';
  }
  log << "samples=" << cfg.samples << " failures=" << failures << " worst_coeff_err=" << sci17(worst) << '\n';
  return failures == 0 ? 0 : 1;
}

int cmd_sweep(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  const auto inst = build_germ_instance(cfg.germ_spec());
  struct Point {
    double delta, fraction;
  };
  std::vector<Point> points;
  for (double d : cfg.sweep_delta) {
    for (double f : cfg.sweep_fraction) points.push_back({d, f});
  }
  std::vector<std::string> rows(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      SolveConfig sc = cfg.solver;
      sc.delta = points[i].delta;
      std::ostringstream row;
      row << sci17(points[i].delta) << ',' << sci17(points[i].fraction) << ',';
      try {
        const double eps = certified_epsilon(inst, sc);
        SplitMix64 rng = SplitMix64(cfg.seed).fork(i);
        const Series x = random_series(rng, inst.origin, sc.s, points[i].fraction * eps);
        const auto r = solve(inst, x, sc);
        row << to_string(r.status) << ',' << r.iterations << ',' << sci17(r.residual) << ',' << rate_text(r.trace);
      } catch (const std::exception& e) {
        row << "Error,0,nan,nan";
      }
      rows[i] = row.str();
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), unsigned(points.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  auto os = open_out(out_dir, "sweep.csv");
  os << "delta,fraction,status,iterations,residual,rate\n";
  for (const auto& r : rows) os << r << '\n';
  log << "sweep points=" << points.size() << '\n';
  return 0;
}

int cmd_epsilon_table(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  auto os = open_out(out_dir, "epsilon_table.csv");
  os << "k,c,Nj,delta,eps_closed,eps_product,rel_err\n";
  double worst = 0.0;
  for (int k : cfg.eps_k) {
    for (double c : cfg.eps_c) {
      for (double nj : cfg.eps_Nj) {
        for (double d : cfg.eps_delta) {
          const double closed = epsilon_closed_form(k, c, nj, d);
          const double product = epsilon_product(k, c, nj, d, kEpsilonTerms);
          const double rel = std::abs(product / closed - 1.0);
          worst = std::max(worst, rel);
          os << k << ',' << sci17(c) << ',' << sci17(nj) << ',' << sci17(d) << ',' << sci17(closed) << ','
             << sci17(product) << ',' << sci17(rel) << '\n';
        }
      }
    }
  }
  log << "worst rel_err=" << sci17(worst) << '\n';
  return worst <= kEpsilonTolerance ? 0 : 1;
}

int run_command(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  switch (cfg.command) {
    case Command::run: return cmd_run(cfg, out_dir, log);
    case Command::verify_group: return cmd_verify_group(cfg, out_dir, log);
    case Command::verify_ac: return cmd_verify_ac(cfg, out_dir, log);
    case Command::measure_j: return cmd_measure_j(cfg, out_dir, log);
    case Command::oracle_compare: return cmd_oracle_compare(cfg, out_dir, log);
    case Command::sweep: return cmd_sweep(cfg, out_dir, log);
    case Command::epsilon_table: return cmd_epsilon_table(cfg, out_dir, log);
  }
  return 2;
}

}  // namespace skam
