#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "winband/basis_rotation.hpp"
#include "winband/cli/commands.hpp"
#include "winband/error.hpp"

using namespace winband;
using std::numbers::pi;

namespace {

CellEigenData random_dataset(std::mt19937_64& rng, int k) {
  std::normal_distribution<double> g;
  const auto c = [&] { return cplx(g(rng), g(rng)); };
  CellEigenData data;
  for (int j = 0; j < k; ++j) data.traces.push_back(TraceData{c(), c(), c(), c()});
  return data;
}

}  // namespace

TEST_CASE("first row normalizes conj(L)") {
  const CellEigenData single{0.0, {TraceData{cplx(1.0, 2.0), cplx(-0.5, 0.0), 0.0, 0.0}}};
  const double theta = 0.7;
  const cplx l = l_theta(single.traces[0], theta);
  const auto row = first_row(single, theta);
  REQUIRE(row.size() == 1);
  CHECK(std::abs(row(0) - std::conj(l) / std::abs(l)) < 1e-15);

  const auto fixture_row = first_row(cli::figure_fixture(1), pi);
  CHECK(std::abs(fixture_row(0) - cplx(-0.6)) < 1e-15);
  CHECK(std::abs(fixture_row(1) - cplx(-0.8)) < 1e-15);
}

TEST_CASE("k = 2 tilde vector and scalar Gram matrix") {
  const auto data = cli::figure_fixture(1);
  const double theta = 1.1;
  const cplx l1 = l_theta(data.traces[0], theta), l2 = l_theta(data.traces[1], theta);
  const auto tv = tilde_vectors(data, theta);
  REQUIRE(tv.size() == 1);
  CHECK(std::abs(tv[0](0) - l2) < 1e-14);
  CHECK(std::abs(tv[0](1) + l1) < 1e-14);
  const auto g = gram(data, theta);
  REQUIRE(g.G.rows() == 1);
  CHECK(g.G(0, 0).real() == doctest::Approx(std::norm(l1) + std::norm(l2)).epsilon(1e-14));
  CHECK(std::abs(g.G(0, 0).imag()) < 1e-14);
}

TEST_CASE("rotation of the first reference list at pi") {
  const auto data = cli::figure_fixture(1);
  const auto rot = rotate_basis(data, pi);
  CHECK(unitarity_residual(rot.a) < 1e-14);
  // 0.25 / 25, evaluated by hand from |L|^2 = 25, |L'|^2 = 13/4, (L', L) = -9.
  CHECK(std::norm(l_theta_prime(rot.rotated_traces[1], pi)) == doctest::Approx(0.01).epsilon(1e-13));
  const auto id = check_rotation_identities(rot, functional_vectors(data, pi));
  CHECK(id.value_identity < 1e-12);
  REQUIRE(id.derivative_identity);
  CHECK(*id.derivative_identity < 1e-12);
}

TEST_CASE("k = 1 rotation is a phase with no derivative identity") {
  const CellEigenData single{0.0, {TraceData{1.0, 2.0, 0.1, 0.4}}};
  const auto rot = rotate_basis(single, 2.0);
  REQUIRE(rot.a.rows() == 1);
  CHECK(std::abs(std::abs(rot.a(0, 0)) - 1.0) < 1e-15);
  const auto id = check_rotation_identities(rot, functional_vectors(single, 2.0));
  CHECK(id.value_identity < 1e-14);
  CHECK_FALSE(id.derivative_identity);
}

TEST_CASE("derivative functional parallel to L leaves nothing for the second mode") {
  // Traces chosen so that L' = (2 - i) L at theta = 0.9.
  const double theta = 0.9;
  const cplx c(2.0, -1.0);
  CellEigenData data;
  for (const cplx vp : {cplx(1.0, 0.5), cplx(-0.3, 2.0)}) {
    TraceData t{vp, 0.4, 0.0, 0.0};
    const cplx l = l_theta(t, theta);
    t.deriv_plus = 0.0;
    t.deriv_minus = c * l;
    data.traces.push_back(t);
  }
  const auto rot = rotate_basis(data, theta);
  CHECK(std::norm(l_theta_prime(rot.rotated_traces[1], theta)) < 1e-24);
}

TEST_CASE("random datasets: constraints, closed-form inverse, unitarity") {
  std::mt19937_64 rng(99);
  for (int k = 1; k <= 6; ++k) {
    const auto data = random_dataset(rng, k);
    for (double theta : {0.0, 0.4, 2.0, pi, 5.5}) {
      const auto rot = rotate_basis(data, theta);
      CHECK(unitarity_residual(rot.a) < 1e-12);
      const auto cr = constraint_residuals(rot);
      CHECK(cr.value < 1e-12);
      CHECK(cr.derivative < 1e-12);
      if (k >= 2) {
        const auto g = gram(data, theta);
        const Eigen::MatrixXcd brute = g.G.inverse();
        CHECK((g.closed_form_inverse() - brute).norm() < 1e-12 * brute.norm());
        const Eigen::MatrixXcd should_be_inverse = g.G_inv_sqrt * g.G_inv_sqrt;
        CHECK((should_be_inverse - brute).norm() < 1e-12 * brute.norm());
      }
    }
  }
}

TEST_CASE("vanishing first functional is rejected") {
  // psi_1 has equal traces, so l(psi_1) = 0 at theta = 0 while L != 0.
  const CellEigenData data{0.0, {TraceData{1.0, 1.0, 0.0, 0.0}, TraceData{2.0, 0.5, 0.0, 0.0}}};
  CHECK_THROWS_AS(tilde_vectors(data, 0.0), Error);
}
