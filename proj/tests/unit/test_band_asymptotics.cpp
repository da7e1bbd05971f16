#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"

#include "winband/band_asymptotics.hpp"
#include "winband/cli/commands.hpp"
#include "winband/error.hpp"

using namespace winband;
using std::numbers::pi;

namespace {

double distance_to_symmetry_points(double a) {
  return std::min({std::abs(a), std::abs(a - pi), std::abs(a - 2.0 * pi)});
}

}  // namespace

TEST_CASE("coefficients of the first reference list") {
  const auto data = cli::figure_fixture(1);
  CHECK(std::abs(log_band_coefficient(functional_vectors(data, pi)) + 25.0 * pi / 2.0) < 1e-12);
  CHECK(std::abs(quadratic_band_coefficient(functional_vectors(data, pi)) - pi / 800.0) < 1e-12);
  CHECK(std::abs(quadratic_band_coefficient(functional_vectors(data, 0.0)) -
                 pi / 8.0 * 30.25 / 5.0) < 1e-12);
}

TEST_CASE("quadratic coefficient vanishes when L' is a multiple of L") {
  FunctionalVectors fv;
  fv.L = Eigen::VectorXcd(3);
  fv.L << cplx(1.0, 2.0), cplx(-0.5, 0.1), cplx(0.0, 3.0);
  fv.Lp = cplx(0.3, -1.7) * fv.L;
  CHECK(std::abs(quadratic_band_coefficient(fv)) < 1e-14);
}

TEST_CASE("quadratic coefficient needs k >= 2") {
  const CellEigenData single{0.0, {TraceData{1.0, 2.0, 0.5, 0.5}}};
  try {
    quadratic_band_coefficient(functional_vectors(single, 1.0));
    FAIL("expected NotApplicable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotApplicable);
  }
}

TEST_CASE("k = 1 constant eigenfunction samples") {
  const double area = 0.9;
  const double v = 1.0 / std::sqrt(area);
  const auto coeffs = sample_bands(CellEigenData{0.0, {TraceData{v, v, 0.0, 0.0}}}, 64);
  CHECK(coeffs.lambda10.empty());
  for (std::size_t m = 0; m < coeffs.thetas.size(); ++m) {
    const double expected = -pi * (1.0 - std::cos(coeffs.thetas[m])) / area;
    CHECK(std::abs(coeffs.lambda01[m] - expected) < 1e-12);
  }
}

TEST_CASE("real traces give a first-harmonic log coefficient") {
  const auto coeffs = sample_bands(cli::figure_fixture(1), 128);
  // |L|^2 = 15 - 10 cos(theta) for the first list.
  for (std::size_t m = 0; m < coeffs.thetas.size(); ++m) {
    const double expected = -pi / 2.0 * (15.0 - 10.0 * std::cos(coeffs.thetas[m]));
    CHECK(std::abs(coeffs.lambda01[m] - expected) < 1e-10);
  }
  const auto intervals = band_intervals(coeffs, 1e-8);
  for (const auto* list : {&intervals[0].arg_lower, &intervals[0].arg_upper}) {
    for (double a : *list) CHECK(distance_to_symmetry_points(a) < 1e-6);
  }
}

TEST_CASE("sixteen samples are finite") {
  const auto coeffs = sample_bands(cli::figure_fixture(1), 16);
  REQUIRE(coeffs.lambda10.size() == 16);
  for (double v : coeffs.lambda10) CHECK(std::isfinite(v));
}

TEST_CASE("first reference list: extrema at the symmetry points") {
  const auto intervals = band_intervals(sample_bands(cli::figure_fixture(1)), 1e-8);
  REQUIRE(intervals.size() == 2);
  const auto& q = intervals[1];
  CHECK(q.order == BandOrder::quadratic_band);
  CHECK(q.classification == ExtremumLocation::endpoints_or_center);
  CHECK(q.lower_coeff == doctest::Approx(pi / 800.0).epsilon(1e-12));
  CHECK(q.upper_coeff == doctest::Approx(pi / 8.0 * 30.25 / 5.0).epsilon(1e-12));
  for (const auto* list : {&q.arg_lower, &q.arg_upper}) {
    for (double a : *list) CHECK(distance_to_symmetry_points(a) < 1e-6);
  }
  // Lambda1- = (pi/2) min |L|^2 = 5 pi / 2, Lambda1+ = 25 pi / 2.
  CHECK(intervals[0].lower_coeff == doctest::Approx(2.5 * pi).epsilon(1e-12));
  CHECK(intervals[0].upper_coeff == doctest::Approx(12.5 * pi).epsilon(1e-12));
}

TEST_CASE("second reference list under the implemented coefficient") {
  // Frozen from a 30-digit evaluation: maximum at 0, minimum at pi.
  const auto intervals = band_intervals(sample_bands(cli::figure_fixture(2)), 1e-8);
  const auto& q = intervals[1];
  CHECK(q.upper_coeff == doctest::Approx(4.8567636427739267).epsilon(1e-12));
  CHECK(q.lower_coeff == doctest::Approx(0.91378055549126198).epsilon(1e-12));
  CHECK(q.classification == ExtremumLocation::endpoints_or_center);
}

TEST_CASE("interior maximizers symmetric about pi") {
  // Second reference list with the M- derivatives negated. Frozen maximizers
  // from a 30-digit root of the analytic derivative.
  auto data = cli::figure_fixture(2);
  for (auto& t : data.traces) t.deriv_minus = -t.deriv_minus;
  const auto intervals = band_intervals(sample_bands(data), 1e-10);
  const auto& q = intervals[1];
  CHECK(q.classification == ExtremumLocation::interior_points);
  REQUIRE(q.arg_upper.size() == 2);
  CHECK(std::abs(q.arg_upper[0] - 1.8599946120311241) < 1e-8);
  CHECK(std::abs(q.arg_upper[1] - 4.4231906951484624) < 1e-8);
  CHECK(std::abs(q.arg_upper[0] + q.arg_upper[1] - 2.0 * pi) < 1e-8);
  CHECK(q.upper_coeff == doctest::Approx(0.58613264744876155).epsilon(1e-12));
}

TEST_CASE("band edges and gap") {
  const auto intervals = band_intervals(sample_bands(cli::figure_fixture(1)), 1e-8);
  const double lambda0 = 3.0;
  const auto edges = band_edges_at_epsilon(intervals, lambda0, 1e-3);
  const double expected_gap = 2.5 * pi / std::log(1000.0) - pi / 8.0 * 30.25 / 5.0 * 1e-6;
  REQUIRE(edges.gap);
  CHECK(*edges.gap == doctest::Approx(expected_gap).epsilon(1e-10));
  CHECK(*edges.gap > 0.0);
  CHECK_FALSE(edges.overlap);
  CHECK(edges.log_band.lower == doctest::Approx(lambda0 + 2.5 * pi / std::log(1000.0)));

  double previous = 0.0;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const auto e = band_edges_at_epsilon(intervals, lambda0, eps);
    REQUIRE(e.relative_gap);
    CHECK(*e.relative_gap > previous);
    CHECK(*e.relative_gap < 1.0);
    previous = *e.relative_gap;
  }
}
