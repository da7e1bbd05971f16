#pragma once

// Quasi-periodic cell problem with small coupling windows, solved directly.
//
// The cell (0, 1) x (-H/2, H/2) is glued to its right neighbour only through
// the window |x2| < epsilon on the side walls: there u(1, x2) = e^{i theta}
// u(0, x2) and the fluxes match; the rest of the boundary is Neumann. The
// discretization reuses the cell edge form, identifying right-wall window
// nodes with their left-wall partners times the phase.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "winband/band_asymptotics.hpp"
#include "winband/cell_solver.hpp"
#include "winband/error.hpp"

namespace winband {

struct WindowedSpec {
  CellSpec base;
  /// Window half-width, 0 < epsilon <= H/2. epsilon = H/2 couples the whole
  /// side wall (the fully quasi-periodic cell).
  double epsilon = 0.0;
  double theta = 0.0;
};

/// Minimum number of grid intervals strictly inside (-epsilon, epsilon).
inline constexpr int kMinWindowIntervals = 6;

struct FloquetOperator {
  TensorGrid grid;
  Eigen::SparseMatrix<cplx> matrix;
  Eigen::VectorXd mass;
  std::vector<Eigen::Index> unknown_of_node;
  std::vector<cplx> factor_of_node;
  double potential_min = 0.0;
  bool whole_edge = false;
};

/// Number of grid intervals lying inside (-epsilon, epsilon).
int window_intervals(const TensorGrid& grid, double epsilon);

/// Throws Error{ResolutionError} when the window is under-resolved and
/// Error{GridError}/Error{Validation} for malformed input.
FloquetOperator assemble_windowed(const WindowedSpec& spec);

/// Quasi-periodic conditions on the whole side walls.
FloquetOperator assemble_periodic(const CellSpec& spec, double theta);

/// max |A - A^*| over the stored entries.
double hermitian_defect(const Eigen::SparseMatrix<cplx>& matrix);

struct FloquetResult {
  double epsilon = 0.0;
  double theta = 0.0;
  double lambda0 = 0.0;
  /// Ascending, with eigen-residuals.
  std::vector<double> eigenvalues;
  std::vector<double> residuals;
  /// lambda^(j), j = 1..count: the j-th largest tracked eigenvalue. The
  /// |ln eps|^{-1} band is the farthest from lambda0, the eps^2 band next.
  double band(int j) const { return eigenvalues[eigenvalues.size() - j]; }
  /// (lambda^(1) - lambda0) |ln eps|
  double r1 = 0.0;
  /// (lambda^(2) - lambda0) / eps^2 when two or more eigenvalues were computed.
  std::optional<double> r2;
  /// (lambda^(j) - lambda0) / eps^3 for j >= 3.
  std::vector<double> r3;
};

/// The `count` eigenvalues of the windowed problem nearest lambda0.
/// Throws Error{NoConvergence}.
FloquetResult eigen_near(const WindowedSpec& spec, double lambda0, int count,
                         const SolveOptions& opts = {});
FloquetResult eigen_near(const FloquetOperator& op, double epsilon, double theta,
                         double lambda0, int count, const SolveOptions& opts = {});

/// eps^2 coefficient from local dipole matching at the windows, used as an
/// independent cross-check of the quadratic band:
///   (pi/4) (|L|^2 |D|^2 - |(D, L)|^2) / |L|^2,
/// with D_j = dpsi_j/dx2(M+) e^{-i theta} - dpsi_j/dx2(M-). It differs from
/// lambda10 in the sign inside the derivative functional and by a factor 2.
double dipole_band_coefficient(const CellEigenData& data, double theta);

/// Convergence of one rate diagnostic towards its predicted limit.
enum class RateKind {
  /// r1 against -lambda01; extrapolated through 1/ratio linear in 1/|ln eps|.
  log_band,
  /// r2 against lambda10; extrapolated linearly in 1/|ln eps|.
  quadratic_band,
  /// prediction zero: |r1| must decay as eps decreases.
  vanishing,
};

std::string_view to_string(RateKind kind);

struct RatePoint {
  double epsilon = 0.0;
  double diagnostic = 0.0;
  double prediction = 0.0;
  /// diagnostic / prediction (diagnostic itself for RateKind::vanishing).
  double ratio = 0.0;
};

struct RateReport {
  RateKind kind = RateKind::log_band;
  double theta = 0.0;
  /// Ordered by decreasing epsilon.
  std::vector<RatePoint> points;
  double extrapolated = 0.0;
  bool positive = false;
  bool monotone = false;
  bool within_tolerance = false;
  double tolerance = 0.0;

  bool passed() const { return positive && monotone && within_tolerance; }
};

/// Relative prediction magnitude below which a point counts as vanishing.
inline constexpr double kVanishingPredictionTol = 1e-10;

/// Vanishing diagnostics below this magnitude are eigensolver roundoff and
/// count as exactly zero.
inline constexpr double kVanishingNoiseFloor = 1e-9;

/// Builds the report from at least three epsilons. Does not throw on a
/// failed trend; see require_trend.
RateReport analyze_rates(RateKind kind, double theta, std::vector<RatePoint> points,
                         double tolerance);

/// Throws TrendViolation carrying the report unless it passed.
void require_trend(const RateReport& report);

class TrendViolation : public Error {
 public:
  explicit TrendViolation(RateReport report);
  const RateReport& report() const noexcept { return report_; }

 private:
  RateReport report_;
};

/// Grid family for a sweep: one window-graded grid per epsilon.
struct GradedGridOptions {
  int per_window = 8;
  double growth = 1.15;
  double max_step = 1.0 / 32.0;
};

/// Degeneracy tuning of a separable-cosine amplitude for k = 2 sweeps.
struct TuneBracket {
  std::string parameter = "amplitude";
  double t_lo = 0.0;
  double t_hi = 1.0;
  int i_even = 0;
  int i_odd = 0;
};

struct SweepConfig {
  double height = 1.0;
  PotentialSpec potential;
  std::vector<double> epsilons;
  std::vector<double> thetas;
  /// Multiplicity of the tracked cell eigenvalue (1 or 2).
  int k = 1;
  /// Cluster of the Neumann spectrum used when k = 1 (0 = ground state).
  int cluster_index = 0;
  /// When set (k = 1), overrides cluster_index with the cluster whose mean is
  /// nearest this value among the lowest eight eigenvalues.
  std::optional<double> lambda0_hint;
  /// Uniform grid (nx, ny) instead of the graded family, when set.
  std::optional<std::pair<int, int>> uniform;
  GradedGridOptions graded;
  std::optional<TuneBracket> tune;
  /// Acceptance tolerances on the extrapolated ratios.
  double log_tolerance = 0.10;
  double quadratic_tolerance = 0.25;
  SolveOptions solve;
};

/// Cell data and windowed eigenvalues for one epsilon, all on one grid.
struct SweepLevel {
  double epsilon = 0.0;
  int nx = 0;
  int ny = 0;
  CellEigenData data;
  std::optional<double> tuned_parameter;
  std::vector<FloquetResult> results;  // one per theta
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepLevel> levels;  // ordered as config.epsilons
  std::vector<RateReport> reports;
  /// k = 2: r2 against dipole_band_coefficient. Informational; not part of
  /// passed().
  std::vector<RateReport> cross_checks;
  /// (lambda^(2) - lambda0) / (lambda^(1) - lambda0) per theta (k = 2 only),
  /// ordered by decreasing epsilon.
  std::vector<std::vector<double>> separation;
  std::vector<bool> separation_decreasing;

  bool passed() const;
};

/// Runs every (epsilon, theta) solve on a worker pool, rebuilding the cell
/// data on each epsilon's grid, then analyzes the trends. Throws the
/// solver errors (ResolutionError, NoCrossing, ...) but not TrendViolation.
SweepResult rate_sweep(const SweepConfig& config);

}  // namespace winband
