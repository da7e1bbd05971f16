#pragma once

// Shift-invert block subspace iteration for a few eigenpairs of a sparse
// Hermitian matrix nearest a target value.

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace winband {

struct SolveOptions {
  /// Extra block vectors beyond the requested count; speeds convergence.
  int block_extra = 4;
  int max_iterations = 400;
  /// Stop once every residual |B x - mu x| is below max(tol, 16 eps |B|).
  double tol = 1e-10;
  /// Residual that must be met on exit (raised to 64 eps |B| on very fine
  /// grids), else Error{NoConvergence}.
  double accept_tol = 1e-8;
  std::uint64_t seed = 20150123;
};

template <class Scalar>
struct EigenPairs {
  using Block = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  /// Ascending.
  std::vector<double> values;
  /// Orthonormal columns, one per value.
  Block vectors;
  std::vector<double> residuals;
  int iterations = 0;
};

/// Optional in-place projection applied to the block after every solve
/// (used to restrict the iteration to a symmetry sector).
template <class Scalar>
using BlockProjector =
    std::function<void(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>&)>;

/// `count` eigenpairs of the Hermitian matrix B closest to `target`, using
/// the shift `shift` for the inverse iteration. Throws Error{NoConvergence}.
template <class Scalar>
EigenPairs<Scalar> nearest_eigenpairs(const Eigen::SparseMatrix<Scalar>& B, double shift,
                                      double target, int count, const SolveOptions& opts = {},
                                      const BlockProjector<Scalar>& project = {});

/// Upper bound on |B|_2 (max absolute row sum).
template <class Scalar>
double norm_bound(const Eigen::SparseMatrix<Scalar>& B);

/// Lower bound on the spectrum from Gershgorin discs.
template <class Scalar>
double gershgorin_lower_bound(const Eigen::SparseMatrix<Scalar>& B);

extern template EigenPairs<double> nearest_eigenpairs(const Eigen::SparseMatrix<double>&, double,
                                                      double, int, const SolveOptions&,
                                                      const BlockProjector<double>&);
extern template EigenPairs<std::complex<double>> nearest_eigenpairs(
    const Eigen::SparseMatrix<std::complex<double>>&, double, double, int, const SolveOptions&,
    const BlockProjector<std::complex<double>>&);
extern template double norm_bound(const Eigen::SparseMatrix<double>&);
extern template double norm_bound(const Eigen::SparseMatrix<std::complex<double>>&);
extern template double gershgorin_lower_bound(const Eigen::SparseMatrix<double>&);
extern template double gershgorin_lower_bound(const Eigen::SparseMatrix<std::complex<double>>&);

}  // namespace winband
