#include "skam/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace skam {

namespace {

const std::map<std::string, Command>& command_table() {
  static const std::map<std::string, Command> table{
      {"run", Command::run},
      {"verify-group", Command::verify_group},
      {"verify-ac", Command::verify_ac},
      {"measure-j", Command::measure_j},
      {"oracle-compare", Command::oracle_compare},
      {"sweep", Command::sweep},
      {"epsilon-table", Command::epsilon_table},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_scalar(const std::string& text) {
  std::istringstream in(text);
  T v{};
  if (!(in >> v)) throw std::runtime_error("cannot parse '" + text + "'");
  std::string rest;
  if (in >> rest) throw std::runtime_error("trailing text in '" + text + "'");
  return v;
}

template <typename T>
std::vector<T> parse_list(std::string text) {
  for (auto& ch : text) {
    if (ch == ',') ch = ' ';
  }
  std::istringstream in(text);
  std::vector<T> out;
  T v{};
  while (in >> v) out.push_back(v);
  if (!in.eof()) throw std::runtime_error("cannot parse list '" + text + "'");
  return out;
}

DiophantineSpec& dio(RunConfig& c) {
  if (!c.diophantine) c.diophantine = DiophantineSpec{};
  return *c.diophantine;
}

}  // namespace

Command parse_command(const std::string& name) {
  const auto it = command_table().find(name);
  if (it == command_table().end()) throw std::invalid_argument("unknown command '" + name + "'");
  return it->second;
}

const char* to_string(Command c) {
  for (const auto& [name, cmd] : command_table()) {
    if (cmd == c) return name.c_str();
  }
  return "?";
}

GermActionSpec RunConfig::germ_spec() const {
  if (int(a_coeffs.size()) > trunc + 1) throw std::runtime_error("a.coeffs exceeds the truncation order");
  Series a = Series::zero_taylor(trunc);
  for (std::size_t m = 0; m < a_coeffs.size(); ++m) a.coeff(int(m)) = a_coeffs[m];
  return {a};
}

RunConfig parse_config(std::istream& in, RunConfig cfg) {
  using Setter = std::function<void(RunConfig&, const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"command", [](RunConfig& c, const std::string& v) { c.command = parse_command(v); }},
      {"a.coeffs", [](RunConfig& c, const std::string& v) { c.a_coeffs = parse_list<double>(v); }},
      {"trunc", [](RunConfig& c, const std::string& v) { c.trunc = parse_scalar<int>(v); }},
      {"alpha", [](RunConfig& c, const std::string& v) { dio(c).alpha = parse_scalar<double>(v); }},
      {"tau", [](RunConfig& c, const std::string& v) { dio(c).tau = parse_scalar<double>(v); }},
      {"C", [](RunConfig& c, const std::string& v) { dio(c).C = parse_scalar<double>(v); }},
      {"modes", [](RunConfig& c, const std::string& v) { dio(c).modes = parse_scalar<int>(v); }},
      {"width", [](RunConfig& c, const std::string& v) { dio(c).width = parse_scalar<double>(v); }},
      {"s", [](RunConfig& c, const std::string& v) { c.solver.s = parse_scalar<double>(v); }},
      {"delta", [](RunConfig& c, const std::string& v) { c.solver.delta = parse_scalar<double>(v); }},
      {"tol", [](RunConfig& c, const std::string& v) { c.solver.tol = parse_scalar<double>(v); }},
      {"residual_tol", [](RunConfig& c, const std::string& v) { c.solver.residual_tol = parse_scalar<double>(v); }},
      {"max_iter", [](RunConfig& c, const std::string& v) { c.solver.max_iter = parse_scalar<int>(v); }},
      {"safety_factor", [](RunConfig& c, const std::string& v) { c.solver.safety_factor = parse_scalar<double>(v); }},
      {"fraction", [](RunConfig& c, const std::string& v) { c.fraction = parse_scalar<double>(v); }},
      {"input", [](RunConfig& c, const std::string& v) { c.input = v; }},
      {"samples", [](RunConfig& c, const std::string& v) { c.samples = parse_scalar<int>(v); }},
      {"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_scalar<std::uint64_t>(v); }},
      {"sweep.delta", [](RunConfig& c, const std::string& v) { c.sweep_delta = parse_list<double>(v); }},
      {"sweep.fraction", [](RunConfig& c, const std::string& v) { c.sweep_fraction = parse_list<double>(v); }},
      {"eps.k", [](RunConfig& c, const std::string& v) { c.eps_k = parse_list<int>(v); }},
      {"eps.c", [](RunConfig& c, const std::string& v) { c.eps_c = parse_list<double>(v); }},
      {"eps.Nj", [](RunConfig& c, const std::string& v) { c.eps_Nj = parse_list<double>(v); }},
      {"eps.delta", [](RunConfig& c, const std::string& v) { c.eps_delta = parse_list<double>(v); }},
      {"measure.modes", [](RunConfig& c, const std::string& v) { c.measure_modes = parse_list<int>(v); }},
      {"measure.k_max", [](RunConfig& c, const std::string& v) { c.measure_k_max = parse_scalar<int>(v); }},
      {"orientation",
       [](RunConfig& c, const std::string& v) {
         if (v == "composition") {
           c.orientation = ProductOrientation::composition;
         } else if (v == "reversed") {
           c.orientation = ProductOrientation::reversed;
         } else {
           throw std::runtime_error("orientation must be 'composition' or 'reversed'");
         }
       }},
  };

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const std::exception& e) {
      throw std::runtime_error("config line " + std::to_string(lineno) + " (" + key + "): " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  return parse_config(in, std::move(base));
}

}  // namespace skam
