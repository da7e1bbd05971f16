#include "winband/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <ostream>

#include "winband/band_asymptotics.hpp"
#include "winband/cli/io.hpp"
#include "winband/error.hpp"
#include "winband/floquet_solver.hpp"
#include "winband/inner_checks.hpp"

namespace winband::cli {

namespace fs = std::filesystem;

CellEigenData figure_fixture(int which) {
  if (which != 1 && which != 2) {
    throw Error(ErrorCode::Validation, "figure case must be 1 or 2");
  }
  CellEigenData data;
  data.lambda0 = 0.0;
  data.traces.push_back(TraceData{1.0, 2.0, 1.5, 2.5});
  if (which == 1) {
    data.traces.push_back(TraceData{1.0, 3.0, 0.5, 2.0});
  } else {
    // Second case: the second mode flips sign at M+ (value -1, derivative
    // -1/2) and keeps value 3 at M-; everything else matches the first case.
    data.traces.push_back(TraceData{-1.0, 3.0, -0.5, 2.0});
  }
  return data;
}

CellEigenData named_fixture(std::string_view name) {
  if (name == "figure-case-1") return figure_fixture(1);
  if (name == "figure-case-2") return figure_fixture(2);
  throw Error(ErrorCode::Validation, "unknown fixture '" + std::string(name) + "'");
}

namespace {

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw Error(ErrorCode::Validation, std::string("missing ") + flag);
}

fs::path summary_path(const Options& opts, const char* suffix) {
  if (!opts.summary.empty()) return opts.summary;
  fs::path p = opts.out;
  p.replace_extension(suffix);
  return p;
}

SolveOptions seeded(const Options& opts) {
  SolveOptions s;
  s.seed = opts.seed;
  return s;
}

}  // namespace

void cmd_cell_solve(const Options& opts, std::ostream& out) {
  require(opts.config, "--config");
  require(opts.out, "--out");
  const CellConfig config = parse_cell_config(read_json(opts.config));
  const TensorGrid grid = TensorGrid::uniform(config.nx, config.ny, config.height);

  CellEigenData data;
  if (config.tune) {
    TuneOptions t;
    t.t_lo = config.tune->t_lo;
    t.t_hi = config.tune->t_hi;
    t.i_even = config.tune->i_even;
    t.i_odd = config.tune->i_odd;
    t.solve = seeded(opts);
    const auto tuned = tune_degeneracy(
        [&](double value) {
          CellSpec spec{grid, config.potential};
          spec.potential.params[config.tune->parameter] = value;
          return spec;
        },
        t);
    out << "tuned " << config.tune->parameter << " = " << format_number(tuned.t_star)
        << " (even " << format_number(tuned.lambda_even) << ", odd "
        << format_number(tuned.lambda_odd) << ")\n";
    data = tuned.data;
  } else {
    const CellOperator op = assemble_neumann(CellSpec{grid, config.potential});
    const EigenpairSet pairs = solve_lowest(op, config.num_modes, Parity::none, seeded(opts));
    out << "eigenvalues:";
    for (double v : pairs.eigenvalues) out << " " << format_number(v);
    out << "\n";
    data = extract_traces(pairs, grid, config.cluster);
  }
  validate_structure(data);
  write_eigendata(opts.out, data);
  out << "lambda0 = " << format_number(data.lambda0) << ", k = " << data.multiplicity()
      << ", non-degenerate: " << (satisfies_nondegeneracy(data) ? "yes" : "no") << "\n";
}

void cmd_bands(const Options& opts, std::ostream& out) {
  require(opts.out, "--out");
  if (opts.config.empty() == opts.fixture.empty()) {
    throw Error(ErrorCode::Validation, "bands needs exactly one of --input and --fixture");
  }
  if (opts.samples < 16) throw Error(ErrorCode::Validation, "--samples must be at least 16");
  const CellEigenData data =
      opts.fixture.empty() ? read_eigendata(opts.config) : named_fixture(opts.fixture);
  validate(data);

  const BandCoefficients coeffs = sample_bands(data, opts.samples);
  const auto intervals = band_intervals(coeffs, opts.refine_tol);
  write_text(opts.out, band_csv(coeffs));
  const fs::path summary = summary_path(opts, ".summary.json");
  write_json(summary, band_summary(data, intervals, opts.epsilons));

  for (const auto& b : intervals) {
    out << to_string(b.order) << ": [" << format_number(b.lower_coeff) << ", "
        << format_number(b.upper_coeff) << "] extrema " << to_string(b.classification) << "\n";
  }
  out << "wrote " << opts.out << " and " << summary.string() << "\n";
}

void cmd_figures(const Options& opts, std::ostream& out) {
  require(opts.out, "--out");
  const BandCoefficients coeffs = sample_bands(figure_fixture(opts.figure_case), opts.samples);
  write_text(opts.out, figure_csv(coeffs));
  out << "wrote " << coeffs.thetas.size() << " samples of case " << opts.figure_case << " to "
      << opts.out << "\n";
}

bool cmd_verify_inner(const Options& opts, std::ostream& out) {
  bool ok = true;
  json doc{{"profiles", json::array()}};
  out << std::scientific << std::setprecision(3);
  out << "profile     window |f|   wall |df/dxi2|   laplacian residual (order) at h = 0.2/2^i\n";
  for (const auto& c : profile_checks()) {
    out << std::left << std::setw(12) << c.name << c.dirichlet << "    " << c.neumann << "       ";
    for (std::size_t i = 0; i < c.harmonicity.h.size(); ++i) {
      out << c.harmonicity.residual[i];
      if (i > 0 && std::isfinite(c.harmonicity.order[i])) {
        out << " (" << std::fixed << std::setprecision(2) << c.harmonicity.order[i] << ")"
            << std::scientific << std::setprecision(3);
      }
      out << "  ";
    }
    out << "\n";
    const bool sine = c.name.find("sin") != std::string::npos;
    if (sine) {
      // The sine argument must visibly fail the wall condition.
      ok = ok && c.neumann > 0.1;
    } else {
      const double order = c.harmonicity.order.back();
      ok = ok && c.dirichlet < 1e-12 && c.neumann < 1e-8 && std::abs(order - 2.0) <= 0.2;
    }
    doc["profiles"].push_back({{"name", c.name},
                               {"dirichlet", c.dirichlet},
                               {"neumann", c.neumann},
                               {"h", c.harmonicity.h},
                               {"laplacian", c.harmonicity.residual}});
  }

  const double phi = 3.14159265358979323846 / 3.0;
  const auto x0 = potential_far_field(phi);
  const auto x1 = dipole_far_field(phi);
  out << "far field along phi = pi/3\n  r        X0 - ln r - ln 2   ratio    X1 - xi1 + cos/(2r)   ratio\n";
  for (std::size_t i = 0; i < x0.radius.size(); ++i) {
    out << "  " << std::setw(8) << std::fixed << std::setprecision(1) << x0.radius[i]
        << std::scientific << std::setprecision(3) << " " << x0.defect[i] << "          "
        << std::fixed << std::setprecision(3) << (i ? x0.ratio[i] : 0.0) << "    "
        << std::scientific << x1.defect[i] << "            " << std::fixed
        << (i ? x1.ratio[i] : 0.0) << "\n";
  }
  ok = ok && std::abs(x0.ratio.back() - 4.0) < 0.05 && std::abs(x1.ratio.back() - 8.0) < 0.2;
  doc["far_field"] = {{"phi", phi},
                      {"radius", x0.radius},
                      {"potential_defect", x0.defect},
                      {"dipole_defect", x1.defect}};
  doc["passed"] = ok;
  if (!opts.out.empty()) write_json(opts.out, doc);
  out << (ok ? "all profile checks passed" : "profile checks FAILED") << "\n";
  return ok;
}

bool cmd_validate(const Options& opts, std::ostream& out) {
  require(opts.config, "--config");
  require(opts.out, "--out");
  SweepConfig config = parse_sweep_config(read_json(opts.config));
  config.solve.seed = opts.seed;
  const SweepResult result = rate_sweep(config);
  write_text(opts.out, sweep_csv(result));
  const std::string summary = sweep_summary(result);
  write_text(summary_path(opts, ".summary.txt"), summary);
  out << summary;
  return result.passed();
}

int run_command(std::string_view name, const Options& opts, std::ostream& out,
                std::ostream& err) {
  const auto report = [&](std::string_view code, const std::string& message,
                          std::optional<double> theta) {
    json e{{"error", code}, {"message", message}};
    if (theta) e["theta"] = *theta;
    err << e.dump() << "\n";
  };
  try {
    if (name == "cell-solve") {
      cmd_cell_solve(opts, out);
    } else if (name == "bands") {
      cmd_bands(opts, out);
    } else if (name == "figures") {
      cmd_figures(opts, out);
    } else if (name == "verify-inner") {
      if (!cmd_verify_inner(opts, out)) {
        report("ContractViolation", "inner-layer profile checks failed", std::nullopt);
        return kExitTrend;
      }
    } else if (name == "validate") {
      if (!cmd_validate(opts, out)) {
        report(to_string(ErrorCode::TrendViolation), "convergence trend checks failed",
               std::nullopt);
        return kExitTrend;
      }
    } else {
      report(to_string(ErrorCode::Validation), "unknown command '" + std::string(name) + "'",
             std::nullopt);
      return kExitInput;
    }
  } catch (const TrendViolation& e) {
    report(to_string(e.code()), e.what(), e.theta());
    return kExitTrend;
  } catch (const Error& e) {
    report(to_string(e.code()), e.what(), e.theta());
    return kExitInput;
  } catch (const std::exception& e) {
    report(to_string(ErrorCode::Validation), e.what(), std::nullopt);
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace winband::cli
