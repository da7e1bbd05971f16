#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "winband/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace winband::cli;

  CLI::App app{"Band spectrum near a limiting cell eigenvalue for cells coupled by small windows"};
  app.require_subcommand(1);
  Options opts;

  auto* cell = app.add_subcommand("cell-solve", "Solve the Neumann cell problem and write eigendata JSON");
  cell->add_option("--config", opts.config, "Cell configuration JSON")->required();
  cell->add_option("--out", opts.out, "Eigendata JSON output")->required();
  cell->add_option("--seed", opts.seed, "Seed for the eigensolver start block");

  auto* bands = app.add_subcommand("bands", "Sample band coefficients over the quasi-momentum");
  bands->add_option("--config,--input", opts.config, "Eigendata JSON");
  bands->add_option("--fixture", opts.fixture, "Built-in data: figure-case-1 or figure-case-2");
  bands->add_option("--out", opts.out, "Band CSV output")->required();
  bands->add_option("--summary", opts.summary, "Interval summary JSON (default: <out>.summary.json)");
  bands->add_option("--samples", opts.samples, "Number of quasi-momentum samples");
  bands->add_option("--refine-tol", opts.refine_tol, "Extremum refinement tolerance");
  bands->add_option("--epsilons", opts.epsilons, "Window sizes for the band position table");

  auto* figures = app.add_subcommand("figures", "Write the reference quadratic-band curves");
  figures->add_option("--case", opts.figure_case, "Parameter list 1 or 2")
      ->check(CLI::IsMember({1, 2}));
  figures->add_option("--out", opts.out, "CSV output")->required();
  figures->add_option("--samples", opts.samples, "Number of quasi-momentum samples");

  auto* inner = app.add_subcommand("verify-inner", "Check the window boundary-layer profiles");
  inner->add_option("--out", opts.out, "Optional JSON report");

  auto* validate = app.add_subcommand("validate", "Run a windowed convergence sweep");
  validate->add_option("--config", opts.config, "Sweep configuration JSON")->required();
  validate->add_option("--out", opts.out, "Eigenvalue CSV output")->required();
  validate->add_option("--summary", opts.summary, "Text report (default: <out>.summary.txt)");
  validate->add_option("--seed", opts.seed, "Seed for the eigensolver start block");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  return run_command(app.get_subcommands().front()->get_name(), opts, std::cout, std::cerr);
}
