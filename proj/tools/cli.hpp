#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tightcert::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_validation = 2,
  exit_nonconvergence = 3,
  exit_consistency_failure = 4,
};

/// Every flag of every subcommand after defaults and validation.
struct RunConfig {
  std::string subcommand;
  std::string surface = "flat-torus"; // flat-torus | icosphere | genus2 | file
  std::string mesh;                   // input path when surface == "file"
  int nx = 0, ny = 0;                 // 0: spacing max(lx, ly) / 64
  double lx = 0.0, ly = 0.0;          // 0: 2 pi
  int subdiv = 4;
  int refine = 2;
  int k = 6;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  int eigen_index = -1; // -1: k - 1
  double fiber_length = 1.0;
  int cover_degree = 1;
  int euler_number = 0;
  std::optional<double> l_min;
  double zero_tol = 1e-9;
  int mode = 1;
  int n = 32;
  std::string direction = "x";
  std::string svg;
  std::string out;
  int threads = 1;
};

/// Parses argv and runs one subcommand. JSON goes to --out or `out`;
/// diagnostics go to `err`. Returns an ExitCode.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

} // namespace tightcert::cli
