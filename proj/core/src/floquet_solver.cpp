#include "winband/floquet_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "assembly.hpp"
#include "parallel.hpp"

namespace winband {

int window_intervals(const TensorGrid& grid, double epsilon) {
  int inside = 0;
  for (double y : grid.x2) {
    if (std::abs(y) < epsilon) ++inside;
  }
  return std::max(0, inside - 1);
}

namespace {

FloquetOperator assemble_coupled(const CellSpec& spec, double epsilon, double theta,
                                 bool whole_edge) {
  if (!std::isfinite(theta)) {
    throw Error(ErrorCode::Validation, "quasi-momentum must be finite");
  }
  const PotentialFn potential = make_potential(spec.potential);
  detail::check_grid(spec.grid, potential, false);
  auto form = detail::assemble_form<cplx>(spec.grid, potential,
                                          detail::SideCoupling{epsilon, theta, whole_edge});
  return FloquetOperator{spec.grid,
                         std::move(form.matrix),
                         std::move(form.mass),
                         std::move(form.unknown_of_node),
                         std::move(form.factor_of_node),
                         form.potential_min,
                         whole_edge};
}

}  // namespace

FloquetOperator assemble_windowed(const WindowedSpec& spec) {
  const double half = 0.5 * spec.base.grid.height();
  if (!(spec.epsilon > 0.0) || spec.epsilon > half * (1.0 + 1e-14)) {
    std::ostringstream msg;
    msg << "window half-width " << spec.epsilon << " outside (0, " << half << "]";
    throw Error(ErrorCode::Validation, msg.str(), spec.theta);
  }
  const bool whole_edge = spec.epsilon >= half;
  if (!whole_edge) {
    const int intervals = window_intervals(spec.base.grid, spec.epsilon);
    if (intervals < kMinWindowIntervals) {
      std::ostringstream msg;
      msg << "window |x2| < " << spec.epsilon << " spans " << intervals
          << " grid intervals; at least " << kMinWindowIntervals << " are required";
      throw Error(ErrorCode::ResolutionError, msg.str(), spec.theta);
    }
  }
  return assemble_coupled(spec.base, spec.epsilon, spec.theta, whole_edge);
}

FloquetOperator assemble_periodic(const CellSpec& spec, double theta) {
  return assemble_coupled(spec, 0.5 * spec.grid.height(), theta, true);
}

double hermitian_defect(const Eigen::SparseMatrix<cplx>& matrix) {
  const Eigen::SparseMatrix<cplx> adj = matrix.adjoint();
  const Eigen::SparseMatrix<cplx> diff = matrix - adj;
  double worst = 0.0;
  for (Eigen::Index c = 0; c < diff.outerSize(); ++c) {
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(diff, c); it; ++it) {
      worst = std::max(worst, std::abs(it.value()));
    }
  }
  return worst;
}

FloquetResult eigen_near(const FloquetOperator& op, double epsilon, double theta,
                         double lambda0, int count, const SolveOptions& opts) {
  if (count < 1) throw Error(ErrorCode::Validation, "eigen_near: count must be positive");
  // Shift just below lambda0: the tracked eigenvalues sit at or above it.
  const double shift = lambda0 - 0.05 * (1.0 + std::abs(lambda0));
  EigenPairs<cplx> pairs;
  try {
    pairs = nearest_eigenpairs<cplx>(op.matrix, shift, lambda0, count, opts);
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), theta);
  }

  FloquetResult out;
  out.epsilon = epsilon;
  out.theta = theta;
  out.lambda0 = lambda0;
  out.eigenvalues = pairs.values;
  out.residuals = pairs.residuals;
  const double log_eps = std::abs(std::log(epsilon));
  out.r1 = (out.band(1) - lambda0) * log_eps;
  if (count >= 2) out.r2 = (out.band(2) - lambda0) / (epsilon * epsilon);
  for (int j = 3; j <= count; ++j) {
    out.r3.push_back((out.band(j) - lambda0) / (epsilon * epsilon * epsilon));
  }
  return out;
}

FloquetResult eigen_near(const WindowedSpec& spec, double lambda0, int count,
                         const SolveOptions& opts) {
  return eigen_near(assemble_windowed(spec), spec.epsilon, spec.theta, lambda0, count, opts);
}

double dipole_band_coefficient(const CellEigenData& data, double theta) {
  const FunctionalVectors fv = functional_vectors(data, theta);
  Eigen::VectorXcd jump(data.multiplicity());
  const cplx phase = std::polar(1.0, -theta);
  for (int j = 0; j < data.multiplicity(); ++j) {
    jump[j] = data.traces[j].deriv_plus * phase - data.traces[j].deriv_minus;
  }
  const double norm2 = fv.norm2_L();
  const double det = std::max(0.0, norm2 * jump.squaredNorm() - std::norm(fv.L.dot(jump)));
  return 0.25 * std::numbers::pi * det / norm2;
}

std::string_view to_string(RateKind kind) {
  switch (kind) {
    case RateKind::log_band: return "log_band";
    case RateKind::quadratic_band: return "quadratic_band";
    case RateKind::vanishing: return "vanishing";
  }
  return "unknown";
}

namespace {

// Intercept of the least-squares line y = a + b s.
double fit_intercept(const std::vector<double>& s, const std::vector<double>& y) {
  const double n = static_cast<double>(s.size());
  double ms = 0.0, my = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    ms += s[i];
    my += y[i];
  }
  ms /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sxx += (s[i] - ms) * (s[i] - ms);
    sxy += (s[i] - ms) * (y[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return my - slope * ms;
}

}  // namespace

RateReport analyze_rates(RateKind kind, double theta, std::vector<RatePoint> points,
                         double tolerance) {
  if (points.size() < 3) {
    throw Error(ErrorCode::Validation, "a rate sweep needs at least three epsilons", theta);
  }
  std::sort(points.begin(), points.end(),
            [](const RatePoint& a, const RatePoint& b) { return a.epsilon > b.epsilon; });

  RateReport report;
  report.kind = kind;
  report.theta = theta;
  report.tolerance = tolerance;
  std::vector<double> s, y;
  for (auto& p : points) {
    p.ratio = kind == RateKind::vanishing ? p.diagnostic : p.diagnostic / p.prediction;
    s.push_back(1.0 / std::abs(std::log(p.epsilon)));
  }

  const auto distance = [&](const RatePoint& p) {
    if (kind != RateKind::vanishing) return std::abs(p.ratio - 1.0);
    return std::abs(p.ratio) < kVanishingNoiseFloor ? 0.0 : std::abs(p.ratio);
  };
  report.positive = true;
  report.monotone = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (kind != RateKind::vanishing && !(points[i].ratio > 0.0)) report.positive = false;
    if (i == 0) continue;
    // A vanishing diagnostic may sit exactly at zero, so it only has to be
    // non-increasing.
    const bool ok = kind == RateKind::vanishing ? distance(points[i]) <= distance(points[i - 1])
                                                : distance(points[i]) < distance(points[i - 1]);
    if (!ok) report.monotone = false;
  }

  switch (kind) {
    case RateKind::log_band:
      // The log series resums as c s / (1 + K s), so 1/ratio is linear in s.
      for (const auto& p : points) y.push_back(1.0 / p.ratio);
      report.extrapolated = 1.0 / fit_intercept(s, y);
      report.within_tolerance = std::abs(report.extrapolated - 1.0) <= tolerance;
      break;
    case RateKind::quadratic_band:
      for (const auto& p : points) y.push_back(p.ratio);
      report.extrapolated = fit_intercept(s, y);
      report.within_tolerance = std::abs(report.extrapolated - 1.0) <= tolerance;
      break;
    case RateKind::vanishing:
      for (const auto& p : points) y.push_back(p.ratio);
      report.extrapolated = fit_intercept(s, y);
      report.within_tolerance =
          std::abs(report.extrapolated) <= tolerance * std::abs(points.front().ratio) ||
          std::all_of(points.begin(), points.end(),
                      [&](const RatePoint& p) { return distance(p) == 0.0; });
      break;
  }
  if (!std::isfinite(report.extrapolated)) report.within_tolerance = false;
  report.points = std::move(points);
  return report;
}

namespace {

std::string describe(const RateReport& report) {
  std::ostringstream msg;
  msg.precision(6);
  msg << to_string(report.kind) << " trend failed at theta = " << report.theta << ":";
  for (const auto& p : report.points) msg << " eps=" << p.epsilon << " ratio=" << p.ratio << ";";
  msg << " extrapolated " << report.extrapolated << " (positive " << report.positive
      << ", monotone " << report.monotone << ", tolerance " << report.tolerance << ")";
  return msg.str();
}

}  // namespace

TrendViolation::TrendViolation(RateReport report)
    : Error(ErrorCode::TrendViolation, describe(report), report.theta),
      report_(std::move(report)) {}

void require_trend(const RateReport& report) {
  if (!report.passed()) throw TrendViolation(report);
}

bool SweepResult::passed() const {
  for (const auto& r : reports) {
    if (!r.passed()) return false;
  }
  for (bool ok : separation_decreasing) {
    if (!ok) return false;
  }
  return true;
}

namespace {

CellSpec spec_with(const SweepConfig& config, const TensorGrid& grid,
                   std::optional<double> tuned) {
  CellSpec spec{grid, config.potential};
  if (tuned) spec.potential.params[config.tune->parameter] = *tuned;
  return spec;
}

void build_level(const SweepConfig& config, SweepLevel& level) {
  const TensorGrid grid =
      config.uniform
          ? TensorGrid::uniform(config.uniform->first, config.uniform->second, config.height)
          : TensorGrid::window_graded(config.height, level.epsilon, config.graded.per_window,
                                      config.graded.growth, config.graded.max_step);
  level.nx = grid.nx();
  level.ny = grid.ny();
  if (window_intervals(grid, level.epsilon) < kMinWindowIntervals) {
    std::ostringstream msg;
    msg << "grid does not resolve the window at epsilon = " << level.epsilon;
    throw Error(ErrorCode::ResolutionError, msg.str());
  }
  if (config.k == 1) {
    const CellOperator op = assemble_neumann(spec_with(config, grid, std::nullopt));
    int cluster = config.cluster_index;
    const int modes = config.lambda0_hint ? std::max(8, cluster + 3) : cluster + 3;
    const auto pairs = solve_lowest(op, modes, Parity::none, config.solve);
    if (config.lambda0_hint) {
      const auto clusters = cluster_eigenvalues(pairs.eigenvalues);
      cluster = 0;
      for (std::size_t c = 1; c < clusters.size(); ++c) {
        if (std::abs(clusters[c].mean - *config.lambda0_hint) <
            std::abs(clusters[cluster].mean - *config.lambda0_hint)) {
          cluster = static_cast<int>(c);
        }
      }
    }
    level.data = extract_traces(pairs, grid, cluster);
    if (level.data.multiplicity() != 1) {
      throw Error(ErrorCode::ClusterAmbiguity, "selected cell eigenvalue is not simple");
    }
    return;
  }
  if (!config.tune) {
    throw Error(ErrorCode::Validation, "k = 2 sweeps need a tuning bracket");
  }
  TuneOptions opts;
  opts.t_lo = config.tune->t_lo;
  opts.t_hi = config.tune->t_hi;
  opts.i_even = config.tune->i_even;
  opts.i_odd = config.tune->i_odd;
  opts.solve = config.solve;
  const auto tuned =
      tune_degeneracy([&](double t) { return spec_with(config, grid, t); }, opts);
  level.tuned_parameter = tuned.t_star;
  level.data = tuned.data;
}

}  // namespace

SweepResult rate_sweep(const SweepConfig& config) {
  if (config.k != 1 && config.k != 2) {
    throw Error(ErrorCode::Validation, "rate sweeps support k = 1 or k = 2");
  }
  if (config.epsilons.size() < 3 || config.thetas.empty()) {
    throw Error(ErrorCode::Validation, "a rate sweep needs >= 3 epsilons and >= 1 theta");
  }
  SweepResult result;
  result.config = config;
  result.levels.resize(config.epsilons.size());
  for (std::size_t e = 0; e < config.epsilons.size(); ++e) {
    result.levels[e].epsilon = config.epsilons[e];
    result.levels[e].results.resize(config.thetas.size());
  }

  detail::parallel_for(result.levels.size(),
                       [&](std::size_t e) { build_level(config, result.levels[e]); });

  const std::size_t nt = config.thetas.size();
  detail::parallel_for(result.levels.size() * nt, [&](std::size_t job) {
    auto& level = result.levels[job / nt];
    const double theta = config.thetas[job % nt];
    const TensorGrid grid =
        config.uniform
            ? TensorGrid::uniform(config.uniform->first, config.uniform->second, config.height)
            : TensorGrid::window_graded(config.height, level.epsilon, config.graded.per_window,
                                        config.graded.growth, config.graded.max_step);
    const WindowedSpec spec{spec_with(config, grid, level.tuned_parameter), level.epsilon, theta};
    level.results[job % nt] = eigen_near(spec, level.data.lambda0, config.k, config.solve);
  });

  for (std::size_t t = 0; t < nt; ++t) {
    const double theta = config.thetas[t];
    std::vector<RatePoint> log_points, quad_points, dipole_points;
    bool vanishing = false;
    std::vector<double> separation;
    for (const auto& level : result.levels) {
      const auto& r = level.results[t];
      const auto fv = evaluate_functionals(level.data, theta);
      if (fv.L.norm() < degenerate_l_tolerance(level.data)) vanishing = true;
      log_points.push_back({level.epsilon, r.r1, -log_band_coefficient(fv), 0.0});
      if (config.k == 2 && !vanishing) {
        quad_points.push_back({level.epsilon, *r.r2, quadratic_band_coefficient(fv), 0.0});
        dipole_points.push_back(
            {level.epsilon, *r.r2, dipole_band_coefficient(level.data, theta), 0.0});
        separation.push_back((r.band(2) - r.lambda0) / (r.band(1) - r.lambda0));
      }
    }
    result.reports.push_back(analyze_rates(vanishing ? RateKind::vanishing : RateKind::log_band,
                                           theta, log_points, config.log_tolerance));
    if (config.k == 2 && !vanishing) {
      result.reports.push_back(
          analyze_rates(RateKind::quadratic_band, theta, quad_points, config.quadratic_tolerance));
      result.cross_checks.push_back(analyze_rates(RateKind::quadratic_band, theta, dipole_points,
                                                  config.quadratic_tolerance));
      // Levels follow config order; report separation by decreasing epsilon.
      std::vector<std::size_t> order(result.levels.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return result.levels[a].epsilon > result.levels[b].epsilon;
      });
      std::vector<double> sorted;
      for (std::size_t i : order) sorted.push_back(separation[i]);
      bool decreasing = true;
      for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (!(sorted[i] < sorted[i - 1]) || !(sorted[i] >= 0.0)) decreasing = false;
      }
      result.separation.push_back(std::move(sorted));
      result.separation_decreasing.push_back(decreasing);
    }
  }
  return result;
}

}  // namespace winband
