#pragma once

// Boundary-layer fields near the window and the matching coefficients that
// tie them to the outer expansion.
//
// Inner coordinates xi = (xi1, xi2) live in the closed upper half-plane. The
// window is gamma = {|xi1| < 1, xi2 = 0}; the rest of the axis, Gamma, is the
// Neumann wall. Two harmonic profiles are used:
//
//   window_potential(xi) = Re ln(z + sqrt(z^2 - 1))   (log/monopole profile)
//   window_dipole(xi)    = Re sqrt(z^2 - 1)            (dipole profile)
//
// with z = xi1 + i xi2 and branches continuous on the upper half-plane,
// ln 1 = 0, sqrt(1) = 1. Both vanish on gamma, have zero normal derivative on
// Gamma, and behave like ln|xi| + ln 2 and xi1 - cos(phi)/(2r) at infinity.

#include <vector>

#include "winband/basis_rotation.hpp"
#include "winband/eigendata.hpp"

namespace winband {

struct InnerPoint {
  double xi1 = 0.0;
  double xi2 = 0.0;
};

/// Argument fed to the log profile. `sine` evaluates the sin z variant,
/// which is kept only to demonstrate that it fails the wall condition.
enum class ProfileArgument { identity, sine };

/// Throws Error{DomainError} for xi2 < 0 or at the window endpoints.
double window_potential(InnerPoint p, ProfileArgument arg = ProfileArgument::identity);
double window_dipole(InnerPoint p);

enum class Side { plus, minus };

/// Matching coefficients at M+ and M-.
///
/// First order (log band), inner field  singular * X0 + regular * ln(eps):
///   singular_{+/-} = (Psi1(M-/+) e^{+/- i theta} - Psi1(M+/-)) / 2
///   regular_{+/-}  = (Psi1(M-/+) e^{+/- i theta} + Psi1(M+/-)) / 2
/// Second order (quadratic band), inner field  dipole * X1 + linear * xi1,
/// plus the log coefficient of the outer corrector singularity.
struct MatchingCoefficients {
  double theta = 0.0;
  cplx singular_plus{}, singular_minus{};
  cplx regular_plus{}, regular_minus{};
  cplx dipole_plus{}, dipole_minus{};
  cplx linear_plus{}, linear_minus{};
  cplx log_plus{}, log_minus{};
  bool has_second_order = false;
};

/// Fills the first-order coefficients from Psi^(1). Throws
/// Error{ConstraintResidual} if the consistency or phase relations fail.
MatchingCoefficients first_order_matching(const RotationResult& rotation);

/// Fills both orders; the log coefficient at M- solves the j = 1
/// second-order solvability condition. Requires k >= 2 and l(Psi^(1)) != 0.
MatchingCoefficients matching_coefficients(const RotationResult& rotation);

/// singular * X0(xi) + regular * ln(eps) on the chosen side.
cplx inner_field_first_order(InnerPoint p, const MatchingCoefficients& c, Side side,
                             double epsilon);

/// dipole * X1(xi) + linear * xi1 on the chosen side.
cplx inner_field_second_order(InnerPoint p, const MatchingCoefficients& c, Side side);

/// Largest violation among the phase relations
///   regular+ = e^{i theta} regular-,  singular+ = -e^{i theta} singular-,
///   linear+  = e^{i theta} linear-,   dipole+   = -e^{i theta} dipole-,
///   log+     = -e^{i theta} log-
/// and the value consistency regular - singular = Psi1(M+/-).
double matching_relation_residual(const MatchingCoefficients& c, const RotationResult& rotation);

/// Right-hand sides of both solvability conditions.
///   first[j]  = -(pi/2) conj(l(Psi^(j))) l(Psi^(1)),   j = 1..k
///   second[j] = pi log- conj(S_j) - (pi/4) dipole- conj(D_j),  j = 1..k
/// with S_j = Psi^(j)(M-) - e^{-i theta} Psi^(j)(M+) and D_j = l'(Psi^(j)).
/// Expected: first[0] is the log coefficient, first[j>0] = 0; second[0] = 0 by
/// construction, second[1] is the quadratic coefficient, second[j>1] = 0.
struct SolvabilityReport {
  std::vector<cplx> first;
  std::vector<cplx> second;
  double log_coefficient = 0.0;
  double quadratic_coefficient = 0.0;
  double first_residual = 0.0;
  double second_residual = 0.0;
};

SolvabilityReport solvability_check(const RotationResult& rotation);

}  // namespace winband
