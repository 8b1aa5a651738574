#include "skam/reports.hpp"

#include <cmath>
#include <map>

namespace skam {

namespace {

// JSON has no infinity; empty aggregates report null.
nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace

nlohmann::json to_json(std::span<const ScalePair> grid) {
  auto arr = nlohmann::json::array();
  for (const auto& p : grid) arr.push_back({{"s", p.s}, {"sigma", p.sigma}});
  return arr;
}

nlohmann::json to_json(const GroupLawReport& r) {
  return {{"kappa_estimate", r.kappa_estimate},
          {"margin_first", finite_or_null(r.margin_first)},
          {"margin_second", finite_or_null(r.margin_second)},
          {"samples", r.samples},
          {"skipped", r.skipped}};
}

nlohmann::json to_json(const AcReport& r) {
  return {{"c_estimate", r.c_estimate},
          {"max_ratio", r.max_ratio},
          {"samples", r.samples},
          {"skipped", r.skipped},
          {"worst_ratio_location", {{"s", r.worst_scale.s}, {"sigma", r.worst_scale.sigma}, {"sample", r.worst_sample}}}};
}

nlohmann::json to_json(const BoundedOperatorEstimate& e) {
  return {{"k", e.k},
          {"N", e.N},
          {"argmax", {{"s", e.argmax.s}, {"sigma", e.argmax.sigma}, {"index", e.argmax_index}}},
          {"grid", to_json(std::span<const ScalePair>(e.grid))}};
}

nlohmann::json to_json(const ActionConstants& k) {
  return {{"k", k.k}, {"c", k.c}, {"Nj", k.Nj}, {"kappa", k.kappa}};
}

nlohmann::json to_json(const CertificateReport& r) {
  std::map<std::string, double> margins;
  std::map<std::string, int> counts;
  for (const auto& c : r.checks) {
    auto [it, fresh] = margins.emplace(c.name, c.margin());
    if (!fresh) it->second = std::min(it->second, c.margin());
    ++counts[c.name];
  }
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [name, m] : margins) out[name] = {{"min_margin", m}, {"checks", counts[name]}};
  nlohmann::json doc = {{"passed", r.passed()}, {"failures", r.failures()}, {"margins", out}};
  if (const auto* f = r.first_failure()) {
    doc["first_failure"] = {{"name", f->name}, {"step", f->step}, {"value", f->value}, {"bound", f->bound}};
  }
  return doc;
}

nlohmann::json summary_json(const SolveResult& r, const SolveConfig& cfg) {
  nlohmann::json doc = {{"status", to_string(r.status)},
                        {"reason", r.reason},
                        {"iterations", r.iterations},
                        {"residual", r.residual},
                        {"residual_scale", (cfg.s - cfg.delta) / 2.0},
                        {"epsilon", r.epsilon},
                        {"input_norm", r.input_norm},
                        {"certified_input", r.certified_input},
                        {"constants_used", to_json(r.constants)},
                        {"config",
                         {{"s", cfg.s},
                          {"delta", cfg.delta},
                          {"max_iter", cfg.max_iter},
                          {"tol", cfg.tol},
                          {"residual_tol", cfg.residual_tol},
                          {"safety_factor", cfg.safety_factor}}},
                        {"certificates", to_json(r.certificates)}};
  double raw_sharp = INFINITY, raw_cauchy = INFINITY;
  for (const auto& row : r.trace) {
    raw_sharp = std::min(raw_sharp, row.raw_sharp_margin);
    raw_cauchy = std::min(raw_cauchy, row.raw_cauchy_margin);
  }
  doc["raw_constant_margins"] = {{"xi_decay_sharp", finite_or_null(raw_sharp)},
                                 {"cauchy_rate", finite_or_null(raw_cauchy)}};
  try {
    doc["quadratic_rate"] = quadratic_rate(r.trace);
  } catch (const std::invalid_argument&) {
    doc["quadratic_rate"] = nullptr;
  }
  return doc;
}

}  // namespace skam
