#pragma once

// Batch commands behind the skam CLI. Each writes its artifacts into `out_dir`
// and returns the process exit status: 0 when every asserted check passed,
// 1 otherwise. Sweeps report statuses as data and return 0.

#include "skam/config.hpp"

#include <filesystem>
#include <ostream>

namespace skam {

int cmd_run(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_verify_group(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_verify_ac(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_measure_j(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_oracle_compare(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_epsilon_table(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

int run_command(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

/// Largest coefficient difference between two series of the same shape.
double max_coeff_error(const Series& a, const Series& b);

}  // namespace skam
