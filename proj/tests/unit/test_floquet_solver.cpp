#include <cmath>
#include <numbers>

#include "doctest.h"

#include "winband/error.hpp"
#include "winband/floquet_solver.hpp"

using namespace winband;
using std::numbers::pi;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Validation;
}

PotentialSpec asymmetric() {
  return PotentialSpec{"separable-cosine",
                       {{"amplitude", 3.0}, {"phase", 1.0}, {"modulation", 0.5}, {"wavenumber", 2 * pi}}};
}

std::vector<RatePoint> points(const std::vector<double>& eps, auto&& ratio) {
  std::vector<RatePoint> out;
  for (double e : eps) out.push_back({e, ratio(e), 1.0, 0.0});
  return out;
}

}  // namespace

TEST_CASE("window covering the whole edge is the periodic operator") {
  const CellSpec cell{TensorGrid::uniform(32, 32, 1.0), asymmetric()};
  for (double theta : {0.0, 1.3}) {
    const auto windowed = assemble_windowed(WindowedSpec{cell, 0.5, theta});
    const auto periodic = assemble_periodic(cell, theta);
    CHECK(windowed.whole_edge);
    CHECK(Eigen::SparseMatrix<cplx>(windowed.matrix - periodic.matrix).norm() == 0.0);
    const auto a = eigen_near(windowed, 0.5, theta, 0.0, 3);
    const auto b = eigen_near(periodic, 0.5, theta, 0.0, 3);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(a.eigenvalues[i] - b.eigenvalues[i]) < 1e-12);
  }
}

TEST_CASE("windowed operator is Hermitian and real at theta = 0") {
  const CellSpec cell{TensorGrid::window_graded(1.0, 0.1, 8), asymmetric()};
  const auto op = assemble_windowed(WindowedSpec{cell, 0.1, 0.0});
  double imag = 0.0;
  for (int k = 0; k < op.matrix.outerSize(); ++k) {
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(op.matrix, k); it; ++it) {
      imag = std::max(imag, std::abs(it.value().imag()));
    }
  }
  CHECK(imag == 0.0);
  CHECK(hermitian_defect(assemble_windowed(WindowedSpec{cell, 0.1, 2.2}).matrix) < 1e-14);
}

TEST_CASE("free periodic cell") {
  // x1-periodic, Neumann in x2: lowest eigenvalues at theta = pi are pi^2 (twice).
  const CellSpec cell{TensorGrid::uniform(64, 32, 1.0), {}};
  const auto r = eigen_near(assemble_periodic(cell, pi), 0.5, pi, 0.0, 2);
  const double h = 1.0 / 64.0;
  const double discrete = 4.0 / (h * h) * std::pow(std::sin(pi * h / 2.0), 2);
  CHECK(r.eigenvalues[0] == doctest::Approx(discrete).epsilon(1e-10));
  CHECK(r.eigenvalues[1] == doctest::Approx(discrete).epsilon(1e-10));
}

TEST_CASE("window preconditions") {
  const CellSpec cell{TensorGrid::uniform(32, 32, 1.0), {}};
  CHECK(code_of([&] { assemble_windowed(WindowedSpec{cell, 0.6, 0.0}); }) == ErrorCode::Validation);
  CHECK(code_of([&] { assemble_windowed(WindowedSpec{cell, 0.0, 0.0}); }) == ErrorCode::Validation);
  CHECK(code_of([&] { assemble_windowed(WindowedSpec{cell, 0.05, 0.0}); }) ==
        ErrorCode::ResolutionError);
  CHECK(window_intervals(TensorGrid::window_graded(1.0, 0.05, 8), 0.05) >= kMinWindowIntervals);
}

TEST_CASE("rate analysis") {
  const std::vector<double> eps{0.08, 0.04, 0.02};
  const auto s = [](double e) { return 1.0 / std::abs(std::log(e)); };

  // ratio = 1 / (1 - 0.5 s) resums exactly
  const auto log = analyze_rates(RateKind::log_band, 1.0,
                                 points(eps, [&](double e) { return 1.0 / (1.0 - 0.5 * s(e)); }), 0.1);
  CHECK(log.extrapolated == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(log.passed());
  CHECK_NOTHROW(require_trend(log));

  const auto quad = analyze_rates(RateKind::quadratic_band, 1.0,
                                  points(eps, [&](double e) { return 1.2 - 0.9 * s(e); }), 0.25);
  CHECK(quad.extrapolated == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(quad.passed());

  const auto bumpy = analyze_rates(RateKind::log_band, 2.0,
                                   points(eps, [](double e) { return e == 0.04 ? 1.3 : 1.1; }), 0.1);
  CHECK_FALSE(bumpy.monotone);
  try {
    require_trend(bumpy);
    FAIL("expected TrendViolation");
  } catch (const TrendViolation& e) {
    CHECK(e.code() == ErrorCode::TrendViolation);
    CHECK(e.report().theta == 2.0);
  }

  const auto negative = analyze_rates(RateKind::log_band, 0.0,
                                      points(eps, [](double e) { return -e; }), 0.1);
  CHECK_FALSE(negative.positive);

  const auto zero = analyze_rates(RateKind::vanishing, 0.0, points(eps, [](double) { return 0.0; }), 0.1);
  CHECK(zero.passed());
  CHECK(std::isfinite(zero.extrapolated));
}

TEST_CASE("symmetric cell at theta = 0 takes the vanishing branch") {
  SweepConfig config;
  config.height = 1.0;
  config.epsilons = {0.16, 0.08, 0.04};
  config.thetas = {0.0};
  config.graded.per_window = 6;
  const auto result = rate_sweep(config);
  REQUIRE(result.reports.size() == 1);
  const auto& r = result.reports[0];
  CHECK(r.kind == RateKind::vanishing);
  for (const auto& p : r.points) CHECK(std::isfinite(p.ratio));
  CHECK(r.passed());
  CHECK(result.passed());
}

TEST_CASE("dipole cross-check coefficient") {
  // (pi/4) |dpsi(M+) e^{-i theta} - dpsi(M-)|^2 for a mode with zero values
  // next to a first mode that carries all of L.
  const CellEigenData data{0.0, {TraceData{1.0, 2.0, 0.0, 0.0}, TraceData{0.0, 0.0, 0.7, 0.2}}};
  const double theta = pi / 2.0;
  const cplx d = 0.7 * std::polar(1.0, -theta) - 0.2;
  CHECK(dipole_band_coefficient(data, theta) == doctest::Approx(pi / 4.0 * std::norm(d)).epsilon(1e-14));
}
