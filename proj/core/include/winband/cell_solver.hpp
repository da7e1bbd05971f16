#pragma once

// Finite-difference Neumann eigensolver for -Laplace + V on the rectangular
// cell (0, 1) x (-H/2, H/2).
//
// The discretization is the edge-based quadratic form
//
//   sum_edges (w_perp / h_edge) |u_a - u_b|^2 + sum_nodes m_node V |u|^2
//
// on a tensor grid with trapezoidal dual lengths, giving S u = lambda M u
// with M the lumped (diagonal) mass. On a uniform grid this is the 5-point
// Laplacian with mirror ghost nodes on every wall. The solvers work with the
// symmetric scaling B = M^{-1/2} S M^{-1/2}.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "winband/eigendata.hpp"
#include "winband/eigensolver.hpp"

namespace winband {

/// Node coordinates of a tensor grid on [0, 1] x [-H/2, H/2].
struct TensorGrid {
  std::vector<double> x1;
  std::vector<double> x2;

  static TensorGrid uniform(int nx, int ny, double height);

  /// Grid resolving a window of half-width `epsilon` on the side walls:
  /// spacing epsilon / (per_window + 1/2) near x2 = 0 so that x2 = +/-eps falls
  /// midway between nodes, geometric growth away from the axis capped at
  /// `max_step`, and uniform x1 spacing no larger than the finest x2 step.
  static TensorGrid window_graded(double height, double epsilon, int per_window = 8,
                                  double growth = 1.15, double max_step = 1.0 / 32.0);

  int nx() const { return static_cast<int>(x1.size()) - 1; }
  int ny() const { return static_cast<int>(x2.size()) - 1; }
  Eigen::Index num_nodes() const { return static_cast<Eigen::Index>(x1.size() * x2.size()); }
  Eigen::Index node(int i, int j) const { return static_cast<Eigen::Index>(j) * (nx() + 1) + i; }
  double height() const { return x2.back() - x2.front(); }

  /// Index j of the node row at x2 = 0, or -1 when there is none.
  int midline() const;
  /// True when x2 is mirror-symmetric about zero.
  bool symmetric_x2() const;
};

/// Named potential from the fixed registry:
///   "zero"
///   "constant"          {value}
///   "separable-cosine"  {amplitude, phase, modulation, wavenumber, offset}
///       V = offset + amplitude cos(2 pi x1 + phase) (1 + modulation cos(wavenumber x2))
/// The separable family is 1-periodic in x1 and even in x2.
struct PotentialSpec {
  std::string kind = "zero";
  std::map<std::string, double> params;

  bool operator==(const PotentialSpec&) const = default;
};

using PotentialFn = std::function<double(double x1, double x2)>;

/// Throws Error{Validation} for unknown kinds or parameter names.
PotentialFn make_potential(const PotentialSpec& spec);

struct CellSpec {
  TensorGrid grid;
  PotentialSpec potential;
};

/// Sparse symmetric-scaled operator together with the lumped mass.
struct CellOperator {
  TensorGrid grid;
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd mass;
  /// min V over the nodes; a lower bound on the discrete spectrum.
  double potential_min = 0.0;
};

/// Throws Error{GridError} for malformed grids (fewer than 16 intervals in a
/// direction, no node on x2 = 0, non-increasing coordinates, potential not
/// periodic in x1).
CellOperator assemble_neumann(const CellSpec& spec);

enum class Parity { none, even, odd };

struct EigenpairSet {
  std::vector<double> eigenvalues;
  /// Node values, normalized so that sum m_node |u|^2 = 1.
  std::vector<Eigen::VectorXd> modes;
  std::vector<double> residuals;
};

/// The m lowest eigenpairs. With a parity other than none the iteration is
/// confined to modes even/odd under x2 -> -x2 (requires a symmetric grid).
EigenpairSet solve_lowest(const CellOperator& op, int m, Parity parity = Parity::none,
                          const SolveOptions& opts = {});

/// Values at M+/M- and 4th-order x2-derivatives along the side walls.
TraceData mode_traces(const TensorGrid& grid, const Eigen::VectorXd& mode);

inline constexpr double kDefaultClusterTol = 1e-7;

struct EigenCluster {
  int first = 0;
  int size = 0;
  double mean = 0.0;
};

/// Groups consecutive eigenvalues closer than cluster_tol (1 + |lambda|).
/// Throws Error{ClusterAmbiguity} when a gap lies between cluster_tol and
/// 10 cluster_tol (relative).
std::vector<EigenCluster> cluster_eigenvalues(const std::vector<double>& eigenvalues,
                                              double cluster_tol = kDefaultClusterTol);

/// CellEigenData of one cluster. Throws Error{ClusterAmbiguity} if the
/// cluster touches the last computed eigenvalue (its size is then unknown).
CellEigenData extract_traces(const EigenpairSet& pairs, const TensorGrid& grid,
                             int cluster_index = 0, double cluster_tol = kDefaultClusterTol);

struct TuneResult {
  double t_star = 0.0;
  double lambda_even = 0.0;
  double lambda_odd = 0.0;
  int iterations = 0;
  /// k = 2; trace 1 is the even mode, trace 2 the odd mode.
  CellEigenData data;
};

struct TuneOptions {
  double t_lo = 0.0;
  double t_hi = 1.0;
  /// Index of the tracked branch within each parity sector (0-based).
  int i_even = 0;
  int i_odd = 0;
  double rel_tol = 1e-9;
  int max_iterations = 200;
  SolveOptions solve;
};

/// Finds t in [t_lo, t_hi] where the tracked even and odd branches cross.
/// Throws Error{NoCrossing} without a sign change and
/// Error{NondegeneracyViolated} when the even mode has equal moduli at M+/-.
TuneResult tune_degeneracy(const std::function<CellSpec(double)>& family,
                           const TuneOptions& opts);

}  // namespace winband
