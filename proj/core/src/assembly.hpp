#pragma once

// Shared edge-form assembly for the closed cell and the windowed cell.

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Sparse>

#include "winband/cell_solver.hpp"

namespace winband::detail {

/// Right-wall nodes with |x2| < epsilon (or every right-wall node when
/// `whole_edge`) are identified with the matching left-wall node times
/// e^{i theta}.
struct SideCoupling {
  double epsilon = 0.0;
  double theta = 0.0;
  bool whole_edge = false;
};

template <class Scalar>
struct AssembledForm {
  Eigen::SparseMatrix<Scalar> matrix;  // M^{-1/2} S M^{-1/2}
  Eigen::VectorXd mass;                // per unknown
  std::vector<Eigen::Index> unknown_of_node;
  std::vector<Scalar> factor_of_node;  // u_node = factor * u_unknown
  double potential_min = 0.0;
};

/// Dual (trapezoidal) lengths of a 1D node set.
std::vector<double> dual_lengths(const std::vector<double>& x);

/// Validates the grid and potential; throws Error{GridError}.
void check_grid(const TensorGrid& grid, const PotentialFn& potential, bool need_midline);

/// Mirror x2 -> -x2 acting on unknowns; empty when the grid is not symmetric.
std::vector<Eigen::Index> reflection_map(const TensorGrid& grid,
                                         const std::vector<Eigen::Index>& unknown_of_node);

/// In-place projection of a block onto the even or odd sector of `mirror`.
template <class Scalar>
void project_parity(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& X,
                    const std::vector<Eigen::Index>& mirror, bool odd) {
  const Scalar sign(odd ? -1.0 : 1.0);
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> col = X.col(c);
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
      X(r, c) = Scalar(0.5) * (col[r] + sign * col[mirror[r]]);
    }
  }
}

template <class Scalar>
AssembledForm<Scalar> assemble_form(const TensorGrid& grid, const PotentialFn& potential,
                                    const std::optional<SideCoupling>& coupling);

extern template AssembledForm<double> assemble_form(const TensorGrid&, const PotentialFn&,
                                                    const std::optional<SideCoupling>&);
extern template AssembledForm<std::complex<double>> assemble_form(
    const TensorGrid&, const PotentialFn&, const std::optional<SideCoupling>&);

}  // namespace winband::detail
