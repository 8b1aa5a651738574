#pragma once

// Line-based `key = value` run configuration; `#` starts a comment.
//
//   a.coeffs      = 0 1 0.3     # base point a, real Taylor coefficients from degree 0
//   trunc         = 32          # truncation degree D
//   alpha, tau, C, modes, width # Fourier / small-divisor instance
//   s, delta, tol, residual_tol, max_iter, safety_factor
//   fraction      = 0.5         # |x|_s as a fraction of eps for generated inputs
//   input         = x.series    # read x from a series file instead
//   samples       = 100
//   sweep.delta, sweep.fraction # lists
//   eps.k, eps.c, eps.Nj, eps.delta
//   measure.modes, measure.k_max
//   orientation   = composition # or `reversed`; group product used by verify-group

#include "skam/instances.hpp"
#include "skam/solver.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace skam {

enum class Command { run, verify_group, verify_ac, measure_j, oracle_compare, sweep, epsilon_table };

Command parse_command(const std::string& name);
const char* to_string(Command c);

struct RunConfig {
  Command command = Command::run;

  std::vector<double> a_coeffs{0.0, 1.0};
  int trunc = 32;

  std::optional<DiophantineSpec> diophantine;  // set when `alpha` is given

  SolveConfig solver;
  double fraction = 0.5;
  std::string input;
  int samples = 100;
  std::uint64_t seed = 42;

  std::vector<double> sweep_delta{0.2, 0.4, 0.6};
  std::vector<double> sweep_fraction{0.25, 0.5, 1.0};

  std::vector<int> eps_k{0, 1, 2};
  std::vector<double> eps_c{1.0, 2.0};
  std::vector<double> eps_Nj{1.0, 3.0};
  std::vector<double> eps_delta{0.1, 0.5, 0.9};

  std::vector<int> measure_modes{32, 64, 128, 256};
  int measure_k_max = 4;

  ProductOrientation orientation = ProductOrientation::composition;

  GermActionSpec germ_spec() const;
};

/// Parse a configuration document; unknown keys and malformed values throw
/// std::runtime_error naming the line.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

}  // namespace skam
