#pragma once

// Limiting-cell spectral data and the boundary functionals built from it.
//
// The junction points are M- = (0, 0) and M+ = (1, 0), the two ends of the
// window axis on the left and right cell walls. Everything downstream only
// needs the values and x2-derivatives of the cell eigenfunctions there.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace winband {

using cplx = std::complex<double>;

/// Values and x2-derivatives of one cell eigenfunction at M+ and M-.
struct TraceData {
  cplx value_plus{};
  cplx value_minus{};
  cplx deriv_plus{};
  cplx deriv_minus{};

  bool operator==(const TraceData&) const = default;
};

/// A limiting eigenvalue together with the traces of an orthonormal basis of
/// its eigenspace. The multiplicity is the number of traces.
struct CellEigenData {
  double lambda0 = 0.0;
  std::vector<TraceData> traces;

  int multiplicity() const noexcept { return static_cast<int>(traces.size()); }

  bool operator==(const CellEigenData&) const = default;
};

/// Relative tolerance on | |psi_1(M+)| - |psi_1(M-)| | below which data is
/// rejected as violating the non-degeneracy assumption.
inline constexpr double kNondegeneracyRelTol = 1e-9;

/// True when the first eigenfunction has distinct moduli at M+ and M-.
bool satisfies_nondegeneracy(const CellEigenData& data, double rel_tol = kNondegeneracyRelTol);

/// Structural checks (non-empty, finite entries). Throws Error{Validation}.
void validate_structure(const CellEigenData& data);

/// Structural checks plus the non-degeneracy assumption.
/// Throws Error{Validation} or Error{NondegeneracyViolated}.
void validate(const CellEigenData& data);

/// psi(M+) e^{-i theta} - psi(M-)
cplx l_theta(const TraceData& trace, double theta);

/// dpsi/dx2(M+) e^{-i theta} + dpsi/dx2(M-). Note the plus sign.
cplx l_theta_prime(const TraceData& trace, double theta);

/// The k-vectors of both functionals at one quasi-momentum.
/// Inner products use (u, v) = sum_j u_j conj(v_j).
struct FunctionalVectors {
  double theta = 0.0;
  Eigen::VectorXcd L;
  Eigen::VectorXcd Lp;

  double norm2_L() const { return L.squaredNorm(); }
  double norm2_Lp() const { return Lp.squaredNorm(); }
  /// (L', L) = sum_j L'_j conj(L_j)
  cplx inner_Lp_L() const { return L.dot(Lp); }
  /// |L|^2 |L'|^2 - |(L', L)|^2, clamped at zero against rounding.
  double gram_determinant() const;
};

/// Component-wise functionals with no degeneracy check.
FunctionalVectors evaluate_functionals(const CellEigenData& data, double theta);

/// Absolute threshold on |L| below which L is treated as zero.
double degenerate_l_tolerance(const CellEigenData& data);

/// As evaluate_functionals, but throws Error{DegenerateL} when |L(theta)| is
/// below degenerate_l_tolerance(data).
FunctionalVectors functional_vectors(const CellEigenData& data, double theta);

}  // namespace winband
