#include "winband/eigendata.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "winband/error.hpp"

namespace winband {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

cplx phase(double theta) { return std::polar(1.0, -theta); }

}  // namespace

bool satisfies_nondegeneracy(const CellEigenData& data, double rel_tol) {
  if (data.traces.empty()) return false;
  const double plus = std::abs(data.traces.front().value_plus);
  const double minus = std::abs(data.traces.front().value_minus);
  const double scale = std::max(plus, minus);
  if (scale == 0.0) return false;
  return std::abs(plus - minus) > rel_tol * scale;
}

void validate_structure(const CellEigenData& data) {
  if (data.traces.empty()) {
    throw Error(ErrorCode::Validation, "eigendata: multiplicity must be at least 1");
  }
  if (!std::isfinite(data.lambda0)) {
    throw Error(ErrorCode::Validation, "eigendata: lambda0 is not finite");
  }
  for (std::size_t j = 0; j < data.traces.size(); ++j) {
    const auto& t = data.traces[j];
    if (!finite(t.value_plus) || !finite(t.value_minus) || !finite(t.deriv_plus) ||
        !finite(t.deriv_minus)) {
      std::ostringstream msg;
      msg << "eigendata: trace " << j + 1 << " has a non-finite entry";
      throw Error(ErrorCode::Validation, msg.str());
    }
  }
}

void validate(const CellEigenData& data) {
  validate_structure(data);
  if (!satisfies_nondegeneracy(data)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "eigendata: |psi_1(M+)| = " << std::abs(data.traces.front().value_plus)
        << " and |psi_1(M-)| = " << std::abs(data.traces.front().value_minus)
        << " coincide within relative tolerance " << kNondegeneracyRelTol;
    throw Error(ErrorCode::NondegeneracyViolated, msg.str());
  }
}

cplx l_theta(const TraceData& trace, double theta) {
  return trace.value_plus * phase(theta) - trace.value_minus;
}

cplx l_theta_prime(const TraceData& trace, double theta) {
  return trace.deriv_plus * phase(theta) + trace.deriv_minus;
}

double FunctionalVectors::gram_determinant() const {
  return std::max(0.0, norm2_L() * norm2_Lp() - std::norm(inner_Lp_L()));
}

FunctionalVectors evaluate_functionals(const CellEigenData& data, double theta) {
  const auto k = static_cast<Eigen::Index>(data.traces.size());
  FunctionalVectors fv{theta, Eigen::VectorXcd(k), Eigen::VectorXcd(k)};
  for (Eigen::Index j = 0; j < k; ++j) {
    fv.L[j] = l_theta(data.traces[j], theta);
    fv.Lp[j] = l_theta_prime(data.traces[j], theta);
  }
  return fv;
}

double degenerate_l_tolerance(const CellEigenData& data) {
  double scale = 0.0;
  for (const auto& t : data.traces) {
    scale = std::max({scale, std::abs(t.value_plus), std::abs(t.value_minus)});
  }
  return 1e-12 * scale;
}

FunctionalVectors functional_vectors(const CellEigenData& data, double theta) {
  auto fv = evaluate_functionals(data, theta);
  const double tol = degenerate_l_tolerance(data);
  if (!(fv.L.norm() > tol)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "|L(theta)| = " << fv.L.norm() << " at theta = " << theta
        << " is below tolerance " << tol;
    throw Error(ErrorCode::DegenerateL, msg.str(), theta);
  }
  return fv;
}

}  // namespace winband
