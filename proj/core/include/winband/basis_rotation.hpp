#pragma once

// Unitary change of eigenbasis adapted to the window functionals.
//
// Given an orthonormal eigenbasis psi_1..psi_k of a k-fold limiting
// eigenvalue, rotate_basis() builds a unitary k x k matrix a(theta) so that
// the rotated functions Psi^(j) = sum_i a_ji psi_i satisfy
//
//   l_theta(Psi^(j))  = 0   for j >= 2,
//   l'_theta(Psi^(j)) = 0   for j >= 3.
//
// Only the first rotated function sees the value functional and only the
// first two see the derivative functional. The construction goes through
// the auxiliary combinations psi~_i = l(psi_i) psi_1 - l(psi_1) psi_i, their
// Gram matrix G and its inverse square root.
//
// All work is on coefficient vectors in C^k: because psi_j is orthonormal,
// coefficient-row orthonormality is the same thing as orthonormality of the
// rotated eigenfunctions.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "winband/eigendata.hpp"

namespace winband {

struct RotationResult {
  double theta = 0.0;
  /// Row j holds the coefficients of Psi^(j) in the psi basis.
  Eigen::MatrixXcd a;
  /// Traces of Psi^(1)..Psi^(k).
  std::vector<TraceData> rotated_traces;
};

struct GramData {
  /// G_ij = l(psi_i) conj(l(psi_j)) + delta_ij |l(psi_1)|^2, i, j = 2..k.
  Eigen::MatrixXcd G;
  Eigen::MatrixXcd G_inv_sqrt;
  /// (l(psi_2), ..., l(psi_k)) and (l'(psi_2), ..., l'(psi_k)).
  Eigen::VectorXcd Ltilde;
  Eigen::VectorXcd Lptilde;
  cplx l1{};
  cplx lp1{};
  /// Full |L|^2 over C^k.
  double norm2_L = 0.0;

  /// |l1|^-2 (E - Ltilde Ltilde^* / |L|^2). The denominator is the full C^k
  /// norm; that is what Sherman-Morrison requires.
  Eigen::MatrixXcd closed_form_inverse() const;
};

/// conj(L) / |L|. Throws Error{DegenerateL}.
Eigen::VectorXcd first_row(const CellEigenData& data, double theta);

/// Coefficient vectors of psi~_2..psi~_k in C^k. Requires k >= 2.
/// Throws Error{DegenerateFirstFunctional} if l(psi_1) vanishes.
std::vector<Eigen::VectorXcd> tilde_vectors(const CellEigenData& data, double theta);

/// Gram matrix of the psi~ combinations and its inverse square root.
/// Throws Error{NotPositiveDefinite} when the smallest eigenvalue drops below
/// |l(psi_1)|^2 (1 - 1e-8).
GramData gram(const CellEigenData& data, double theta);

/// Builds a(theta) and the rotated traces, then checks unitarity and the
/// vanishing constraints; throws Error{ConstraintResidual} on failure.
RotationResult rotate_basis(const CellEigenData& data, double theta);

/// Traces of sum_i a_ji psi_i for every row j of `a`.
std::vector<TraceData> rotate_traces(const Eigen::MatrixXcd& a,
                                     const std::vector<TraceData>& traces);

/// Residuals of the two norm identities satisfied by the rotation:
///   | |l(Psi^(1))|^2 - |L|^2 |
///   | |l'(Psi^(2))|^2 - (|L|^2 |L'|^2 - |(L',L)|^2) / |L|^2 |   (k >= 2)
struct RotationIdentityReport {
  double value_identity = 0.0;
  std::optional<double> derivative_identity;
};

RotationIdentityReport check_rotation_identities(const RotationResult& result,
                                                 const FunctionalVectors& vectors);

/// max |a a^* - I|
double unitarity_residual(const Eigen::MatrixXcd& a);

/// Largest |l(Psi^(j))| over j >= 2 and |l'(Psi^(j))| over j >= 3.
struct ConstraintResiduals {
  double value = 0.0;
  double derivative = 0.0;
};

ConstraintResiduals constraint_residuals(const RotationResult& result);

}  // namespace winband
