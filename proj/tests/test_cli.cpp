#include <doctest.h>

#include "skam/config.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace skam;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "skam_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SKAM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "run.cfg";
  std::ofstream(p) << text;
  return p;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in(
      "# germ run\n"
      "command = sweep\n"
      "a.coeffs = 0 1 0.3   # curved\n"
      "trunc = 16\n"
      "delta = 0.4\n"
      "sweep.fraction = 0.5 10\n"
      "alpha = 0.618\n"
      "orientation = reversed\n");
  const RunConfig cfg = parse_config(in);
  CHECK(cfg.command == Command::sweep);
  CHECK(cfg.trunc == 16);
  CHECK(cfg.solver.delta == 0.4);
  CHECK(cfg.sweep_fraction == std::vector<double>{0.5, 10});
  REQUIRE(cfg.diophantine);
  CHECK(cfg.diophantine->alpha == 0.618);
  CHECK(cfg.orientation == ProductOrientation::reversed);
  const auto spec = cfg.germ_spec();
  CHECK(spec.order() == 16);
  CHECK(spec.a.coeff(2) == std::complex<double>(0.3));

  std::istringstream unknown("colour = blue\n");
  CHECK_THROWS(parse_config(unknown));
  std::istringstream malformed("trunc = many\n");
  CHECK_THROWS(parse_config(malformed));
  std::istringstream bad_orientation("orientation = sideways\n");
  CHECK_THROWS(parse_config(bad_orientation));
  std::istringstream no_equals("trunc 16\n");
  CHECK_THROWS(parse_config(no_equals));
  CHECK_THROWS(parse_command("solve"));
}

TEST_CASE("run writes artifacts and converges") {
  const auto dir = scratch("run");
  CHECK(run_cli("--command run --seed 42 --out " + dir.string()) == 0);
  for (const char* f : {"trace.csv", "result.json", "g.series"}) CHECK(fs::exists(dir / f));
  const auto doc = nlohmann::json::parse(slurp(dir / "result.json"));
  CHECK(doc["status"] == "Converged");
  CHECK(doc["residual"].get<double>() <= 1e-10);
  CHECK(doc["certificates"]["passed"] == true);
}

TEST_CASE("run is reproducible for a fixed seed") {
  const auto a = scratch("repro_a"), b = scratch("repro_b"), c = scratch("repro_c");
  REQUIRE(run_cli("--seed 7 --out " + a.string()) == 0);
  REQUIRE(run_cli("--seed 7 --out " + b.string()) == 0);
  REQUIRE(run_cli("--seed 8 --out " + c.string()) == 0);
  CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
  CHECK(slurp(a / "g.series") == slurp(b / "g.series"));
  CHECK(slurp(a / "trace.csv") != slurp(c / "trace.csv"));
}

TEST_CASE("zero input") {
  const auto dir = scratch("zero");
  const auto cfg = write_config(dir, "fraction = 0\n");
  CHECK(run_cli("--config " + cfg.string() + " --out " + dir.string()) == 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "result.json"));
  CHECK(doc["iterations"] == 0);
}

TEST_CASE("input far outside the ball fails loudly") {
  const auto dir = scratch("far");
  const auto cfg = write_config(dir, "fraction = 50\n");
  CHECK(run_cli("--config " + cfg.string() + " --out " + dir.string()) == 1);
  const auto doc = nlohmann::json::parse(slurp(dir / "result.json"));
  CHECK(doc["status"] != "Converged");
}

TEST_CASE("input series file") {
  const auto dir = scratch("input");
  std::ofstream(dir / "x.series") << "kind=taylor order=8\n1 1.0e-4 0\n2 5.0e-5 0\n";
  const auto cfg = write_config(dir, "trunc = 8\ninput = " + (dir / "x.series").string() + "\n");
  CHECK(run_cli("--config " + cfg.string() + " --out " + dir.string()) == 0);
}

TEST_CASE("configuration errors exit with status 2") {
  const auto dir = scratch("errors");
  CHECK(run_cli("--command nonsense --out " + dir.string()) == 2);
  const auto cfg = write_config(dir, "colour = blue\n");
  CHECK(run_cli("--config " + cfg.string() + " --out " + dir.string()) == 2);
  CHECK(run_cli("--config " + (dir / "missing.cfg").string()) == 2);
  const auto oracle = write_config(dir, "command = oracle-compare\na.coeffs = 0 1 0.2\n");
  CHECK(run_cli("--config " + oracle.string() + " --out " + dir.string()) == 2);
}

TEST_CASE("epsilon table") {
  const auto dir = scratch("eps");
  REQUIRE(run_cli("--command epsilon-table --out " + dir.string()) == 0);
  const auto rows = lines(slurp(dir / "epsilon_table.csv"));
  CHECK(rows.front() == "k,c,Nj,delta,eps_closed,eps_product,rel_err");
  CHECK(rows.size() == 1 + 3 * 2 * 2 * 3);
  bool found = false;
  for (const auto& r : rows) {
    if (r.rfind("0,1.0000000000000000e+00,1.0000000000000000e+00,5.0000000000000000e-01,9.7656250000000000e-04", 0) == 0) {
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("sweep") {
  const auto a = scratch("sweep_a"), b = scratch("sweep_b");
  REQUIRE(run_cli("--command sweep --out " + a.string()) == 0);
  REQUIRE(run_cli("--command sweep --out " + b.string()) == 0);
  const std::string text = slurp(a / "sweep.csv");
  CHECK(text == slurp(b / "sweep.csv"));
  const auto rows = lines(text);
  REQUIRE(rows.size() == 10);
  CHECK(rows.front() == "delta,fraction,status,iterations,residual,rate");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].find(",Converged,") != std::string::npos);

  const auto far = scratch("sweep_far");
  const auto cfg = write_config(far, "command = sweep\nsweep.fraction = 10\n");
  CHECK(run_cli("--config " + cfg.string() + " --out " + far.string()) == 0);
  CHECK(lines(slurp(far / "sweep.csv")).size() == 4);
}

TEST_CASE("verification commands") {
  const auto dir = scratch("verify");
  CHECK(run_cli("--command verify-group --out " + dir.string()) == 0);
  CHECK(run_cli("--command verify-ac --out " + dir.string()) == 0);
  CHECK(run_cli("--command measure-j --out " + dir.string()) == 0);
  CHECK(run_cli("--command oracle-compare --out " + dir.string()) == 0);
  for (const char* f : {"group_law.json", "ac.json", "measure_j.json", "oracle_compare.csv"}) CHECK(fs::exists(dir / f));
  const auto ac = nlohmann::json::parse(slurp(dir / "ac.json"));
  CHECK(ac["scaling"]["slopes"].size() == 20);

  const auto coh = scratch("measure_coh");
  const auto cfg = write_config(coh, "command = measure-j\nalpha = 0.6180339887498949\nmeasure.k_max = 2\n");
  CHECK(run_cli("--config " + cfg.string() + " --out " + coh.string()) == 0);
  const auto doc = nlohmann::json::parse(slurp(coh / "measure_j.json"));
  CHECK(doc["selected_k"] == 1);
}
