#include "winband/inner_layer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "winband/band_asymptotics.hpp"
#include "winband/error.hpp"

namespace winband {

namespace {

using std::numbers::pi;

void check_domain(InnerPoint p) {
  if (!(p.xi2 >= 0.0) || !std::isfinite(p.xi1) || !std::isfinite(p.xi2)) {
    throw Error(ErrorCode::DomainError, "inner point must lie in the closed upper half-plane");
  }
  if (p.xi2 == 0.0 && std::abs(p.xi1) == 1.0) {
    throw Error(ErrorCode::DomainError, "inner profiles are singular at the window endpoints");
  }
}

// sqrt(w - 1) sqrt(w + 1): analytic off [-1, 1], ~ w at infinity, and equal
// to +sqrt(w^2 - 1) for real w > 1.
cplx root_product(cplx w) { return std::sqrt(w - 1.0) * std::sqrt(w + 1.0); }

cplx phase(double theta) { return std::polar(1.0, theta); }

}  // namespace

double window_potential(InnerPoint p, ProfileArgument arg) {
  check_domain(p);
  const cplx z(p.xi1, p.xi2);
  const cplx w = arg == ProfileArgument::identity ? z : std::sin(z);
  return std::log(std::abs(w + root_product(w)));
}

double window_dipole(InnerPoint p) {
  check_domain(p);
  return root_product(cplx(p.xi1, p.xi2)).real();
}

MatchingCoefficients first_order_matching(const RotationResult& rotation) {
  const auto& psi1 = rotation.rotated_traces.front();
  const cplx e = phase(rotation.theta);
  MatchingCoefficients c;
  c.theta = rotation.theta;
  c.singular_plus = 0.5 * (psi1.value_minus * e - psi1.value_plus);
  c.singular_minus = 0.5 * (psi1.value_plus * std::conj(e) - psi1.value_minus);
  c.regular_plus = 0.5 * (psi1.value_minus * e + psi1.value_plus);
  c.regular_minus = 0.5 * (psi1.value_plus * std::conj(e) + psi1.value_minus);

  const double scale = 1.0 + std::abs(psi1.value_plus) + std::abs(psi1.value_minus);
  const double residual = matching_relation_residual(c, rotation);
  if (residual > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "first-order matching relations violated, residual " << residual;
    throw Error(ErrorCode::ConstraintResidual, msg.str(), rotation.theta);
  }
  return c;
}

MatchingCoefficients matching_coefficients(const RotationResult& rotation) {
  if (rotation.rotated_traces.size() < 2) {
    throw Error(ErrorCode::NotApplicable, "second-order matching needs multiplicity k >= 2",
                rotation.theta);
  }
  MatchingCoefficients c = first_order_matching(rotation);
  const double theta = rotation.theta;
  const cplx e = phase(theta);
  const auto& psi1 = rotation.rotated_traces[0];
  const auto& psi2 = rotation.rotated_traces[1];
  const cplx dp = psi2.deriv_plus, dm = psi2.deriv_minus;

  c.dipole_plus = 0.5 * (e * dm + dp);
  c.dipole_minus = -0.5 * (std::conj(e) * dp + dm);
  c.linear_plus = 0.5 * (dp - e * dm);
  c.linear_minus = -0.5 * (dm - std::conj(e) * dp);

  // j = 1 solvability: 0 = pi log- conj(S1) - (pi/4) dipole- conj(D1)
  const cplx s1 = psi1.value_minus - std::conj(e) * psi1.value_plus;
  const cplx d1 = psi1.deriv_minus + std::conj(e) * psi1.deriv_plus;
  if (std::abs(s1) == 0.0) {
    throw Error(ErrorCode::DegenerateL, "l(Psi^(1)) vanishes; log coefficient undetermined",
                theta);
  }
  c.log_minus = c.dipole_minus / 4.0 * std::conj(d1) / std::conj(s1);
  c.log_plus = -e * c.log_minus;
  c.has_second_order = true;

  const double scale = 1.0 + std::abs(dp) + std::abs(dm) + std::abs(psi1.value_plus) +
                       std::abs(psi1.value_minus) + std::abs(c.log_minus);
  const double residual = matching_relation_residual(c, rotation);
  if (residual > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "second-order matching relations violated, residual " << residual;
    throw Error(ErrorCode::ConstraintResidual, msg.str(), theta);
  }
  return c;
}

cplx inner_field_first_order(InnerPoint p, const MatchingCoefficients& c, Side side,
                             double epsilon) {
  const double x0 = window_potential(p);
  const double le = std::log(epsilon);
  return side == Side::plus ? c.singular_plus * x0 + c.regular_plus * le
                            : c.singular_minus * x0 + c.regular_minus * le;
}

cplx inner_field_second_order(InnerPoint p, const MatchingCoefficients& c, Side side) {
  const double x1 = window_dipole(p);
  return side == Side::plus ? c.dipole_plus * x1 + c.linear_plus * p.xi1
                            : c.dipole_minus * x1 + c.linear_minus * p.xi1;
}

double matching_relation_residual(const MatchingCoefficients& c, const RotationResult& rotation) {
  const cplx e = phase(c.theta);
  const auto& psi1 = rotation.rotated_traces.front();
  double r = std::max({
      std::abs(c.regular_plus - e * c.regular_minus),
      std::abs(c.singular_plus + e * c.singular_minus),
      std::abs(c.regular_plus - c.singular_plus - psi1.value_plus),
      std::abs(c.regular_minus - c.singular_minus - psi1.value_minus),
  });
  if (c.has_second_order) {
    const auto& psi2 = rotation.rotated_traces[1];
    r = std::max({
        r,
        std::abs(c.linear_plus - e * c.linear_minus),
        std::abs(c.dipole_plus + e * c.dipole_minus),
        std::abs(c.log_plus + e * c.log_minus),
        std::abs(c.dipole_minus + c.linear_minus + psi2.deriv_minus),
        std::abs(c.dipole_plus + c.linear_plus - psi2.deriv_plus),
    });
  }
  return r;
}

SolvabilityReport solvability_check(const RotationResult& rotation) {
  const auto& tr = rotation.rotated_traces;
  const double theta = rotation.theta;
  const std::size_t k = tr.size();
  SolvabilityReport rep;

  // the coefficient formulas are unitarily invariant, so evaluating them on
  // the rotated traces gives the same numbers as on the original basis
  const CellEigenData rotated{0.0, tr};
  const auto fv = evaluate_functionals(rotated, theta);
  rep.log_coefficient = log_band_coefficient(fv);

  const cplx l1 = l_theta(tr[0], theta);
  rep.first.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    rep.first[j] = -0.5 * pi * std::conj(l_theta(tr[j], theta)) * l1;
    const cplx expected = j == 0 ? cplx(rep.log_coefficient) : cplx(0.0);
    rep.first_residual = std::max(rep.first_residual, std::abs(rep.first[j] - expected));
  }

  if (k >= 2) {
    rep.quadratic_coefficient = quadratic_band_coefficient(fv);
    const auto c = matching_coefficients(rotation);
    const cplx em = std::polar(1.0, -theta);
    rep.second.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
      const cplx s = tr[j].value_minus - em * tr[j].value_plus;
      const cplx d = tr[j].deriv_minus + em * tr[j].deriv_plus;
      rep.second[j] = pi * c.log_minus * std::conj(s) - pi / 4.0 * c.dipole_minus * std::conj(d);
      const cplx expected = j == 1 ? cplx(rep.quadratic_coefficient) : cplx(0.0);
      rep.second_residual = std::max(rep.second_residual, std::abs(rep.second[j] - expected));
    }
  }
  return rep;
}

}  // namespace winband
