#include "winband/basis_rotation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "winband/error.hpp"

namespace winband {

namespace {

constexpr double kCompletionSkipTol = 1e-10;
constexpr double kFallbackDirectionTol = 1e-10;
constexpr double kConstraintThrowTol = 1e-8;

// Orthonormal basis of C^n whose first vector is `lead`; the rest come from
// Gram-Schmidt over e_1, e_2, ... in index order, skipping vectors that are
// (numerically) in the span already built.
Eigen::MatrixXcd complete_basis(const Eigen::VectorXcd& lead) {
  const Eigen::Index n = lead.size();
  Eigen::MatrixXcd basis(n, n);
  basis.col(0) = lead;
  Eigen::Index filled = 1;
  for (Eigen::Index e = 0; e < n && filled < n; ++e) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Unit(n, e);
    // two passes of classical Gram-Schmidt keep the result orthogonal to
    // working precision
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index q = 0; q < filled; ++q) {
        v -= basis.col(q).dot(v) * basis.col(q);
      }
    }
    const double norm = v.norm();
    if (norm < kCompletionSkipTol) continue;
    basis.col(filled++) = v / norm;
  }
  return basis;
}

}  // namespace

Eigen::MatrixXcd GramData::closed_form_inverse() const {
  const Eigen::Index n = Ltilde.size();
  return (Eigen::MatrixXcd::Identity(n, n) - Ltilde * Ltilde.adjoint() / norm2_L) /
         std::norm(l1);
}

Eigen::VectorXcd first_row(const CellEigenData& data, double theta) {
  const auto fv = functional_vectors(data, theta);
  return fv.L.conjugate() / fv.L.norm();
}

std::vector<Eigen::VectorXcd> tilde_vectors(const CellEigenData& data, double theta) {
  const int k = data.multiplicity();
  if (k < 2) {
    throw Error(ErrorCode::NotApplicable, "tilde_vectors: multiplicity must be at least 2");
  }
  const auto fv = evaluate_functionals(data, theta);
  const cplx l1 = fv.L[0];
  if (!(std::abs(l1) > degenerate_l_tolerance(data))) {
    throw Error(ErrorCode::DegenerateFirstFunctional,
                "l_theta(psi_1) vanishes; trace data is inconsistent with non-degeneracy", theta);
  }
  std::vector<Eigen::VectorXcd> out;
  out.reserve(k - 1);
  for (int i = 1; i < k; ++i) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(k);
    v[0] = fv.L[i];
    v[i] = -l1;
    out.push_back(std::move(v));
  }
  return out;
}

GramData gram(const CellEigenData& data, double theta) {
  const int k = data.multiplicity();
  if (k < 2) {
    throw Error(ErrorCode::NotApplicable, "gram: multiplicity must be at least 2");
  }
  const auto fv = evaluate_functionals(data, theta);
  GramData g;
  g.l1 = fv.L[0];
  g.lp1 = fv.Lp[0];
  if (!(std::abs(g.l1) > degenerate_l_tolerance(data))) {
    throw Error(ErrorCode::DegenerateFirstFunctional,
                "l_theta(psi_1) vanishes; Gram matrix is singular", theta);
  }
  g.Ltilde = fv.L.tail(k - 1);
  g.Lptilde = fv.Lp.tail(k - 1);
  g.norm2_L = fv.norm2_L();

  const double l1sq = std::norm(g.l1);
  g.G = g.Ltilde * g.Ltilde.adjoint();
  g.G.diagonal().array() += l1sq;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(g.G);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  if (eig.info() != Eigen::Success || ev.minCoeff() < l1sq * (1.0 - 1e-8)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Gram matrix smallest eigenvalue " << ev.minCoeff() << " is below |l(psi_1)|^2 = "
        << l1sq;
    throw Error(ErrorCode::NotPositiveDefinite, msg.str(), theta);
  }
  const Eigen::VectorXd inv_sqrt = ev.array().rsqrt();
  g.G_inv_sqrt = eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().adjoint();
  return g;
}

std::vector<TraceData> rotate_traces(const Eigen::MatrixXcd& a,
                                     const std::vector<TraceData>& traces) {
  std::vector<TraceData> out(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    TraceData t;
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
      const cplx c = a(j, i);
      const auto& s = traces[static_cast<std::size_t>(i)];
      t.value_plus += c * s.value_plus;
      t.value_minus += c * s.value_minus;
      t.deriv_plus += c * s.deriv_plus;
      t.deriv_minus += c * s.deriv_minus;
    }
    out[static_cast<std::size_t>(j)] = t;
  }
  return out;
}

double unitarity_residual(const Eigen::MatrixXcd& a) {
  const Eigen::MatrixXcd defect =
      a * a.adjoint() - Eigen::MatrixXcd::Identity(a.rows(), a.rows());
  return defect.cwiseAbs().maxCoeff();
}

ConstraintResiduals constraint_residuals(const RotationResult& result) {
  ConstraintResiduals r;
  const auto& tr = result.rotated_traces;
  for (std::size_t j = 1; j < tr.size(); ++j) {
    r.value = std::max(r.value, std::abs(l_theta(tr[j], result.theta)));
    if (j >= 2) {
      r.derivative = std::max(r.derivative, std::abs(l_theta_prime(tr[j], result.theta)));
    }
  }
  return r;
}

RotationResult rotate_basis(const CellEigenData& data, double theta) {
  validate_structure(data);
  const int k = data.multiplicity();
  const auto fv = functional_vectors(data, theta);

  RotationResult result;
  result.theta = theta;
  result.a.resize(k, k);
  result.a.row(0) = (fv.L.conjugate() / fv.L.norm()).transpose();

  if (k >= 2) {
    const GramData g = gram(data, theta);
    const Eigen::VectorXcd direction = g.lp1 * g.Ltilde - g.l1 * g.Lptilde;
    const Eigen::VectorXcd w = g.G_inv_sqrt * direction;

    // |G^{-1/2}| <= 1/|l1|, so this is the natural size of w
    const double scale =
        (std::abs(g.lp1) * g.Ltilde.norm() + std::abs(g.l1) * g.Lptilde.norm()) / std::abs(g.l1);
    const double wnorm = w.norm();
    Eigen::MatrixXcd z;
    if (wnorm > kFallbackDirectionTol * scale && wnorm > 0.0) {
      z = complete_basis(w / wnorm);
    } else {
      z = Eigen::MatrixXcd::Identity(k - 1, k - 1);
    }

    const Eigen::MatrixXcd b = z.adjoint() * g.G_inv_sqrt;
    Eigen::MatrixXcd tilde = Eigen::MatrixXcd::Zero(k - 1, k);
    for (int i = 0; i < k - 1; ++i) {
      tilde(i, 0) = g.Ltilde[i];
      tilde(i, i + 1) = -g.l1;
    }
    Eigen::MatrixXcd rows = b * tilde;
    rows.rowwise().normalize();
    result.a.bottomRows(k - 1) = rows;
  }

  result.rotated_traces = rotate_traces(result.a, data.traces);

  double scale = 1.0;
  for (const auto& t : data.traces) {
    scale = std::max({scale, std::abs(t.value_plus), std::abs(t.value_minus),
                      std::abs(t.deriv_plus), std::abs(t.deriv_minus)});
  }
  const double unit = unitarity_residual(result.a);
  const auto cr = constraint_residuals(result);
  if (unit > kConstraintThrowTol || cr.value > kConstraintThrowTol * scale ||
      cr.derivative > kConstraintThrowTol * scale) {
    std::ostringstream msg;
    msg << "basis rotation residuals too large: unitarity " << unit << ", value constraint "
        << cr.value << ", derivative constraint " << cr.derivative;
    throw Error(ErrorCode::ConstraintResidual, msg.str(), theta);
  }
  return result;
}

RotationIdentityReport check_rotation_identities(const RotationResult& result,
                                                 const FunctionalVectors& vectors) {
  RotationIdentityReport report;
  const auto& tr = result.rotated_traces;
  const double norm2_L = vectors.norm2_L();
  report.value_identity = std::abs(std::norm(l_theta(tr.front(), result.theta)) - norm2_L);
  if (tr.size() >= 2) {
    const double expected = vectors.gram_determinant() / norm2_L;
    report.derivative_identity =
        std::abs(std::norm(l_theta_prime(tr[1], result.theta)) - expected);
  }
  return report;
}

}  // namespace winband
