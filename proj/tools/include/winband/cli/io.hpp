#pragma once

// File formats of the command-line tool. Every floating-point number is
// written with 17 significant digits so that it re-parses to the same double.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "winband/band_asymptotics.hpp"
#include "winband/cell_solver.hpp"
#include "winband/floquet_solver.hpp"

namespace winband::cli {

using nlohmann::json;

std::string format_number(double value);

/// {"lambda0": x, "k": n, "traces": [{"value_plus": [re, im], "value_minus": ..,
///   "deriv_plus": .., "deriv_minus": ..}, ...]}
json eigendata_to_json(const CellEigenData& data);
/// Complex entries may also be plain numbers. Throws Error{Validation}.
CellEigenData eigendata_from_json(const json& doc);

/// Throws Error{Io} on file errors and Error{Validation} on malformed JSON.
json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& doc);
void write_text(const std::filesystem::path& path, const std::string& text);

CellEigenData read_eigendata(const std::filesystem::path& path);
void write_eigendata(const std::filesystem::path& path, const CellEigenData& data);

/// "theta,lambda01,lambda10"; lambda10 is empty when k = 1.
std::string band_csv(const BandCoefficients& coeffs);

struct BandCsvRow {
  double theta = 0.0;
  double lambda01 = 0.0;
  std::optional<double> lambda10;
};

/// Parses band_csv output. Throws Error{Validation}.
std::vector<BandCsvRow> parse_band_csv(const std::string& text);

/// "theta,lambda10"
std::string figure_csv(const BandCoefficients& coeffs);

/// Band edge coefficients, extremizers, classification, and leading-order
/// band positions at each epsilon.
json band_summary(const CellEigenData& data, const std::vector<BandInterval>& intervals,
                  const std::vector<double>& epsilons);

/// Cell-solve input:
/// {"height", "nx", "ny", "potential": {"kind", "params"}, "num_modes",
///  optional "cluster", optional "tune": {"parameter", "t_lo", "t_hi",
///  "i_even", "i_odd"}}
struct CellConfig {
  double height = 1.0;
  int nx = 64;
  int ny = 64;
  PotentialSpec potential;
  int num_modes = 6;
  int cluster = 0;
  std::optional<TuneBracket> tune;
};

CellConfig parse_cell_config(const json& doc);
PotentialSpec parse_potential(const json& doc);

/// Validation input:
/// {"cell": {"height", "potential"}, "epsilons", "thetas", "k",
///  optional "lambda0_hint", "cluster", "grid", "tune", "tolerances"}
SweepConfig parse_sweep_config(const json& doc);

/// "epsilon,theta,j,lambda,r_diagnostic" with j counted as in FloquetResult::band.
std::string sweep_csv(const SweepResult& result);

/// Human-readable report with one PASS/FAIL line per trend.
std::string sweep_summary(const SweepResult& result);

}  // namespace winband::cli
