#include "winband/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <type_traits>
#include <variant>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "winband/error.hpp"

namespace winband {

namespace {

template <class Scalar>
using Sparse = Eigen::SparseMatrix<Scalar>;
template <class Scalar>
using Block = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
Scalar random_entry(std::mt19937_64& rng, std::normal_distribution<double>& nd) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return nd(rng);
  } else {
    const double re = nd(rng);
    return Scalar(re, nd(rng));
  }
}

// (B - shift I)^{-1}: LDLT when the shifted matrix is positive definite,
// LU otherwise.
template <class Scalar>
class ShiftedSolver {
 public:
  ShiftedSolver(const Sparse<Scalar>& B, double shift) {
    Sparse<Scalar> I(B.rows(), B.cols());
    I.setIdentity();
    shifted_ = B - Scalar(shift) * I;
    shifted_.makeCompressed();

    ldlt_.compute(shifted_);
    if (ldlt_.info() == Eigen::Success) {
      const auto d = ldlt_.vectorD();
      bool definite = true;
      for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (!(std::real(d[i]) > 0.0)) {
          definite = false;
          break;
        }
      }
      if (definite) {
        use_ldlt_ = true;
        return;
      }
    }
    lu_.analyzePattern(shifted_);
    lu_.factorize(shifted_);
    if (lu_.info() != Eigen::Success) {
      throw Error(ErrorCode::NoConvergence, "shifted matrix factorization failed: " +
                                                lu_.lastErrorMessage());
    }
  }

  Block<Scalar> solve(const Block<Scalar>& rhs) const {
    if (use_ldlt_) return ldlt_.solve(rhs);
    return lu_.solve(rhs);
  }

 private:
  Sparse<Scalar> shifted_;
  bool use_ldlt_ = false;
  Eigen::SimplicialLDLT<Sparse<Scalar>> ldlt_;
  mutable Eigen::SparseLU<Sparse<Scalar>, Eigen::COLAMDOrdering<int>> lu_;
};

template <class Scalar>
Block<Scalar> orthonormalize(const Block<Scalar>& Y) {
  Eigen::HouseholderQR<Block<Scalar>> qr(Y);
  return qr.householderQ() * Block<Scalar>::Identity(Y.rows(), Y.cols());
}

}  // namespace

template <class Scalar>
double norm_bound(const Sparse<Scalar>& B) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(B.rows());
  for (Eigen::Index c = 0; c < B.outerSize(); ++c) {
    for (typename Sparse<Scalar>::InnerIterator it(B, c); it; ++it) {
      rows[it.row()] += std::abs(it.value());
    }
  }
  return rows.size() ? rows.maxCoeff() : 0.0;
}

template <class Scalar>
double gershgorin_lower_bound(const Sparse<Scalar>& B) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(B.rows());
  Eigen::VectorXd off = Eigen::VectorXd::Zero(B.rows());
  for (Eigen::Index c = 0; c < B.outerSize(); ++c) {
    for (typename Sparse<Scalar>::InnerIterator it(B, c); it; ++it) {
      if (it.row() == it.col()) {
        diag[it.row()] += std::real(it.value());
      } else {
        off[it.row()] += std::abs(it.value());
      }
    }
  }
  return (diag - off).minCoeff();
}

template <class Scalar>
EigenPairs<Scalar> nearest_eigenpairs(const Sparse<Scalar>& B, double shift, double target,
                                      int count, const SolveOptions& opts,
                                      const BlockProjector<Scalar>& project) {
  const Eigen::Index n = B.rows();
  if (count < 1 || count + opts.block_extra > n) {
    throw Error(ErrorCode::Validation, "eigensolver: requested count is out of range");
  }
  const Eigen::Index p = std::min<Eigen::Index>(n, count + opts.block_extra);
  const double roundoff = std::numeric_limits<double>::epsilon() * norm_bound(B);
  const double stop_tol = std::max(opts.tol, 16.0 * roundoff);
  const double accept_tol = std::max(opts.accept_tol, 64.0 * roundoff);

  ShiftedSolver<Scalar> solver(B, shift);

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> nd;
  Block<Scalar> X(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = random_entry<Scalar>(rng, nd);
  }
  if (project) project(X);
  X = orthonormalize<Scalar>(X);

  EigenPairs<Scalar> out;
  std::vector<double> ritz(p);
  std::vector<Eigen::Index> order(p);
  std::vector<double> residuals(count);
  for (int it = 1; it <= opts.max_iterations; ++it) {
    Block<Scalar> Y = solver.solve(X);
    if (project) project(Y);
    const Block<Scalar> Q = orthonormalize<Scalar>(Y);
    const Block<Scalar> BQ = B * Q;
    Block<Scalar> T = Q.adjoint() * BQ;
    T = (0.5 * (T + T.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Block<Scalar>> small(T);
    X = Q * small.eigenvectors();
    const Block<Scalar> BX = BQ * small.eigenvectors();

    for (Eigen::Index j = 0; j < p; ++j) ritz[j] = small.eigenvalues()[j];
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return std::abs(ritz[a] - target) < std::abs(ritz[b] - target);
    });

    double worst = 0.0;
    for (int j = 0; j < count; ++j) {
      const Eigen::Index c = order[j];
      residuals[j] = (BX.col(c) - ritz[c] * X.col(c)).norm();
      worst = std::max(worst, residuals[j]);
    }
    out.iterations = it;
    if (worst < stop_tol || it == opts.max_iterations) {
      if (!(worst < accept_tol)) {
        std::ostringstream msg;
        msg << "subspace iteration did not converge after " << it
            << " iterations; worst residual " << worst;
        throw Error(ErrorCode::NoConvergence, msg.str());
      }
      std::vector<Eigen::Index> chosen(order.begin(), order.begin() + count);
      std::vector<int> rank(count);
      std::iota(rank.begin(), rank.end(), 0);
      std::sort(rank.begin(), rank.end(),
                [&](int a, int b) { return ritz[chosen[a]] < ritz[chosen[b]]; });
      out.values.resize(count);
      out.residuals.resize(count);
      out.vectors.resize(n, count);
      for (int j = 0; j < count; ++j) {
        out.values[j] = ritz[chosen[rank[j]]];
        out.residuals[j] = residuals[rank[j]];
        out.vectors.col(j) = X.col(chosen[rank[j]]);
      }
      return out;
    }
  }
  throw Error(ErrorCode::NoConvergence, "subspace iteration exhausted its iteration budget");
}

template EigenPairs<double> nearest_eigenpairs(const Sparse<double>&, double, double, int,
                                               const SolveOptions&,
                                               const BlockProjector<double>&);
template EigenPairs<std::complex<double>> nearest_eigenpairs(
    const Sparse<std::complex<double>>&, double, double, int, const SolveOptions&,
    const BlockProjector<std::complex<double>>&);
template double norm_bound(const Sparse<double>&);
template double norm_bound(const Sparse<std::complex<double>>&);
template double gershgorin_lower_bound(const Sparse<double>&);
template double gershgorin_lower_bound(const Sparse<std::complex<double>>&);

}  // namespace winband
