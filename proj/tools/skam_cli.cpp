// skam: batch front-end for the scaled-group homogeneity solver.
//
//   skam --command run --config run.cfg --out results/ --seed 42

#include "skam/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Scaled-group orbit solver and certificate checks"};
  std::optional<std::string> command;
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;

  app.add_option("--command", command, "run | verify-group | verify-ac | measure-j | oracle-compare | sweep | epsilon-table");
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for sampled inputs");
  CLI11_PARSE(app, argc, argv);

  try {
    skam::RunConfig cfg;
    if (!config_path.empty()) cfg = skam::load_config(config_path);
    if (command) cfg.command = skam::parse_command(*command);
    if (seed) cfg.seed = *seed;
    return skam::run_command(cfg, out_dir, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
