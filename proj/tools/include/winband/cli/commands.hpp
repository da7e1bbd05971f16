#pragma once

// Subcommands of the `winband` tool. Each cmd_* function throws on failure;
// run_command maps exceptions to the exit-code contract and writes a
// machine-readable error object to the error stream.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "winband/eigendata.hpp"

namespace winband::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitTrend = 3;

struct Options {
  std::string config;   // input file (cell/validate config, or eigendata for bands)
  std::string out;      // primary output file
  std::string summary;  // secondary output; derived from `out` when empty
  std::string fixture;  // built-in eigendata for bands
  int samples = 1024;
  int figure_case = 1;
  std::uint64_t seed = 20150123;
  double refine_tol = 1e-8;
  std::vector<double> epsilons{0.1, 0.05, 0.01};
};

/// Built-in trace data behind the two reference band plots.
CellEigenData figure_fixture(int which);
/// "figure-case-1" or "figure-case-2"; throws Error{Validation} otherwise.
CellEigenData named_fixture(std::string_view name);

void cmd_cell_solve(const Options& opts, std::ostream& out);
void cmd_bands(const Options& opts, std::ostream& out);
void cmd_figures(const Options& opts, std::ostream& out);
/// Returns false when a contract check of the profiles fails.
bool cmd_verify_inner(const Options& opts, std::ostream& out);
/// Returns false when a convergence trend fails.
bool cmd_validate(const Options& opts, std::ostream& out);

/// Dispatches by subcommand name and returns the process exit code:
/// 0 success, 2 input or validation error, 3 trend or contract failure.
int run_command(std::string_view name, const Options& opts, std::ostream& out,
                std::ostream& err);

}  // namespace winband::cli
