#include "winband/cell_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "assembly.hpp"
#include "winband/error.hpp"

namespace winband {

TensorGrid TensorGrid::uniform(int nx, int ny, double height) {
  if (nx < 1 || ny < 1 || !(height > 0.0)) {
    throw Error(ErrorCode::GridError, "uniform grid needs positive sizes and height");
  }
  TensorGrid g;
  g.x1.resize(nx + 1);
  g.x2.resize(ny + 1);
  for (int i = 0; i <= nx; ++i) g.x1[i] = static_cast<double>(i) / nx;
  g.x1.back() = 1.0;
  // Centered indexing keeps x2 exactly symmetric and puts a node on 0 for even ny.
  const double h = height / ny;
  for (int j = 0; j <= ny; ++j) g.x2[j] = (j - 0.5 * ny) * h;
  return g;
}

TensorGrid TensorGrid::window_graded(double height, double epsilon, int per_window,
                                     double growth, double max_step) {
  const double half = 0.5 * height;
  if (!(height > 0.0) || !(epsilon > 0.0) || !(epsilon < half) || per_window < 1 ||
      !(growth >= 1.0) || !(max_step > 0.0)) {
    throw Error(ErrorCode::GridError, "invalid window-graded grid parameters");
  }
  const double h0 = epsilon / (per_window + 0.5);
  std::vector<double> pos{0.0};
  const double core_end = std::min(2.0 * epsilon, half - 2.0 * h0);
  while (pos.back() + h0 <= core_end) pos.push_back(pos.back() + h0);
  double h = h0;
  for (;;) {
    h = std::min(h * growth, std::max(max_step, h0));
    if (pos.back() + 1.5 * h >= half) break;
    pos.push_back(pos.back() + h);
  }
  pos.push_back(half);

  TensorGrid g;
  g.x2.reserve(2 * pos.size() - 1);
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) g.x2.push_back(-*it);
  for (std::size_t k = 1; k < pos.size(); ++k) g.x2.push_back(pos[k]);
  g.x2.front() = -half;
  g.x2[pos.size() - 1] = 0.0;

  const int nx = std::max(16, static_cast<int>(std::ceil(1.0 / h0 - 1e-9)));
  g.x1.resize(nx + 1);
  for (int i = 0; i <= nx; ++i) g.x1[i] = static_cast<double>(i) / nx;
  g.x1.back() = 1.0;
  return g;
}

int TensorGrid::midline() const {
  for (std::size_t j = 0; j < x2.size(); ++j) {
    if (x2[j] == 0.0) return static_cast<int>(j);
  }
  return -1;
}

bool TensorGrid::symmetric_x2() const {
  const std::size_t n = x2.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(x2[j] + x2[n - 1 - j]) > 1e-14 * (1.0 + std::abs(x2[j]))) return false;
  }
  return true;
}

PotentialFn make_potential(const PotentialSpec& spec) {
  const auto check_names = [&](std::set<std::string> allowed) {
    for (const auto& [name, value] : spec.params) {
      if (!allowed.count(name)) {
        throw Error(ErrorCode::Validation,
                    "potential '" + spec.kind + "' has no parameter '" + name + "'");
      }
      if (!std::isfinite(value)) {
        throw Error(ErrorCode::Validation, "potential parameter '" + name + "' is not finite");
      }
    }
  };
  const auto get = [&](const std::string& name, double fallback) {
    const auto it = spec.params.find(name);
    return it == spec.params.end() ? fallback : it->second;
  };

  if (spec.kind == "zero") {
    check_names({});
    return [](double, double) { return 0.0; };
  }
  if (spec.kind == "constant") {
    check_names({"value"});
    const double value = get("value", 0.0);
    return [value](double, double) { return value; };
  }
  if (spec.kind == "separable-cosine") {
    check_names({"amplitude", "phase", "modulation", "wavenumber", "offset"});
    const double amplitude = get("amplitude", 1.0);
    const double phase = get("phase", 0.0);
    const double modulation = get("modulation", 0.0);
    const double wavenumber = get("wavenumber", 0.0);
    const double offset = get("offset", 0.0);
    return [=](double x1, double x2) {
      return offset + amplitude * std::cos(2.0 * std::numbers::pi * x1 + phase) *
                          (1.0 + modulation * std::cos(wavenumber * x2));
    };
  }
  throw Error(ErrorCode::Validation, "unknown potential kind '" + spec.kind + "'");
}

CellOperator assemble_neumann(const CellSpec& spec) {
  const PotentialFn potential = make_potential(spec.potential);
  detail::check_grid(spec.grid, potential, true);
  auto form = detail::assemble_form<double>(spec.grid, potential, std::nullopt);
  return CellOperator{spec.grid, std::move(form.matrix), std::move(form.mass),
                      form.potential_min};
}

EigenpairSet solve_lowest(const CellOperator& op, int m, Parity parity, const SolveOptions& opts) {
  if (m < 1) throw Error(ErrorCode::Validation, "solve_lowest: m must be positive");
  BlockProjector<double> project;
  std::vector<Eigen::Index> mirror;
  if (parity != Parity::none) {
    std::vector<Eigen::Index> identity(op.grid.num_nodes());
    for (Eigen::Index k = 0; k < op.grid.num_nodes(); ++k) identity[k] = k;
    mirror = detail::reflection_map(op.grid, identity);
    if (mirror.empty()) {
      throw Error(ErrorCode::GridError, "parity sectors need an x2-symmetric grid");
    }
    const bool odd = parity == Parity::odd;
    project = [&mirror, odd](Eigen::MatrixXd& X) { detail::project_parity(X, mirror, odd); };
  }

  // S is positive semidefinite, so B >= min V; shifting below that keeps the
  // shifted matrix definite and the lowest modes dominant.
  const double shift = op.potential_min - 1.0;
  const auto pairs = nearest_eigenpairs<double>(op.matrix, shift, shift, m, opts, project);

  EigenpairSet out;
  out.eigenvalues = pairs.values;
  out.residuals = pairs.residuals;
  const Eigen::VectorXd scale = op.mass.array().rsqrt();
  for (int k = 0; k < m; ++k) {
    Eigen::VectorXd u = scale.cwiseProduct(pairs.vectors.col(k));
    // Sign convention: the largest-magnitude entry is positive.
    Eigen::Index at = 0;
    u.cwiseAbs().maxCoeff(&at);
    if (u[at] < 0.0) u = -u;
    out.modes.push_back(std::move(u));
  }
  return out;
}

namespace {

// d/dx of the Lagrange interpolant through (xs, f) evaluated at x0.
std::vector<double> derivative_weights(const std::vector<double>& xs, double x0) {
  const std::size_t n = xs.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double sum = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      if (m == k) continue;
      double prod = 1.0 / (xs[k] - xs[m]);
      for (std::size_t l = 0; l < n; ++l) {
        if (l == k || l == m) continue;
        prod *= (x0 - xs[l]) / (xs[k] - xs[l]);
      }
      sum += prod;
    }
    w[k] = sum;
  }
  return w;
}

}  // namespace

TraceData mode_traces(const TensorGrid& grid, const Eigen::VectorXd& mode) {
  const int mid = grid.midline();
  if (mid < 0) throw Error(ErrorCode::GridError, "no grid row on x2 = 0");
  if (mode.size() != grid.num_nodes()) {
    throw Error(ErrorCode::Validation, "mode size does not match the grid");
  }
  const int ny = grid.ny();
  const int lo = std::clamp(mid - 2, 0, ny - 4);
  std::vector<double> xs;
  for (int j = lo; j < lo + 5; ++j) xs.push_back(grid.x2[j]);
  const auto w = derivative_weights(xs, 0.0);
  const auto trace_at = [&](int i) {
    double d = 0.0;
    for (int k = 0; k < 5; ++k) d += w[k] * mode[grid.node(i, lo + k)];
    return std::pair{mode[grid.node(i, mid)], d};
  };
  const auto [vp, dp] = trace_at(grid.nx());
  const auto [vm, dm] = trace_at(0);
  return TraceData{vp, vm, dp, dm};
}

std::vector<EigenCluster> cluster_eigenvalues(const std::vector<double>& eigenvalues,
                                              double cluster_tol) {
  std::vector<EigenCluster> clusters;
  if (eigenvalues.empty()) return clusters;
  int first = 0;
  const auto close = [&](int end) {
    double sum = 0.0;
    for (int k = first; k < end; ++k) sum += eigenvalues[k];
    clusters.push_back({first, end - first, sum / (end - first)});
    first = end;
  };
  for (std::size_t k = 0; k + 1 < eigenvalues.size(); ++k) {
    const double gap = eigenvalues[k + 1] - eigenvalues[k];
    const double scale = 1.0 + std::abs(eigenvalues[k]);
    if (gap < cluster_tol * scale) continue;
    if (gap < 10.0 * cluster_tol * scale) {
      std::ostringstream msg;
      msg << "eigenvalue gap " << gap << " after lambda = " << eigenvalues[k]
          << " is neither a clear cluster nor a clear separation";
      throw Error(ErrorCode::ClusterAmbiguity, msg.str());
    }
    close(static_cast<int>(k) + 1);
  }
  close(static_cast<int>(eigenvalues.size()));
  return clusters;
}

CellEigenData extract_traces(const EigenpairSet& pairs, const TensorGrid& grid,
                             int cluster_index, double cluster_tol) {
  const auto clusters = cluster_eigenvalues(pairs.eigenvalues, cluster_tol);
  if (cluster_index < 0 || cluster_index >= static_cast<int>(clusters.size())) {
    throw Error(ErrorCode::ClusterAmbiguity, "requested cluster was not computed");
  }
  const auto& c = clusters[cluster_index];
  if (c.first + c.size == static_cast<int>(pairs.eigenvalues.size())) {
    throw Error(ErrorCode::ClusterAmbiguity,
                "cluster reaches the last computed eigenvalue; compute more modes");
  }
  CellEigenData data;
  data.lambda0 = c.mean;
  for (int k = c.first; k < c.first + c.size; ++k) {
    data.traces.push_back(mode_traces(grid, pairs.modes[k]));
  }
  return data;
}

TuneResult tune_degeneracy(const std::function<CellSpec(double)>& family,
                           const TuneOptions& opts) {
  if (!(opts.t_lo < opts.t_hi) || opts.i_even < 0 || opts.i_odd < 0) {
    throw Error(ErrorCode::Validation, "tune_degeneracy: invalid bracket or branch index");
  }
  struct Branches {
    double even, odd;
    CellOperator op;
    EigenpairSet even_set, odd_set;
  };
  const auto evaluate = [&](double t) {
    CellOperator op = assemble_neumann(family(t));
    auto even = solve_lowest(op, opts.i_even + 1, Parity::even, opts.solve);
    auto odd = solve_lowest(op, opts.i_odd + 1, Parity::odd, opts.solve);
    const double le = even.eigenvalues[opts.i_even];
    const double lo = odd.eigenvalues[opts.i_odd];
    return Branches{le, lo, std::move(op), std::move(even), std::move(odd)};
  };

  double a = opts.t_lo, b = opts.t_hi;
  Branches ba = evaluate(a);
  Branches bb = evaluate(b);
  double fa = ba.even - ba.odd;
  double fb = bb.even - bb.odd;
  if (fa * fb > 0.0) {
    std::ostringstream msg;
    msg << "tracked branches do not cross in [" << a << ", " << b << "] (gaps " << fa << ", "
        << fb << ")";
    throw Error(ErrorCode::NoCrossing, msg.str());
  }

  // Illinois variant of false position.
  double t = std::abs(fa) < std::abs(fb) ? a : b;
  Branches best = std::abs(fa) < std::abs(fb) ? std::move(ba) : std::move(bb);
  int iterations = 0;
  const auto converged = [&](const Branches& br) {
    return std::abs(br.even - br.odd) < opts.rel_tol * (1.0 + std::abs(br.even));
  };
  while (!converged(best)) {
    if (++iterations > opts.max_iterations) {
      throw Error(ErrorCode::NoConvergence, "degeneracy tuning exhausted its iteration budget");
    }
    const double c = b - fb * (b - a) / (fb - fa);
    Branches bc = evaluate(c);
    const double fc = bc.even - bc.odd;
    if (fc * fb < 0.0) {
      a = b;
      fa = fb;
    } else {
      fa *= 0.5;
    }
    b = c;
    fb = fc;
    t = c;
    best = std::move(bc);
    if (std::abs(b - a) < 1e-15 * (1.0 + std::abs(b)) && !converged(best)) {
      throw Error(ErrorCode::NoConvergence, "degeneracy bracket collapsed without a crossing");
    }
  }

  TuneResult out;
  out.t_star = t;
  out.lambda_even = best.even;
  out.lambda_odd = best.odd;
  out.iterations = iterations;
  out.data.lambda0 = 0.5 * (best.even + best.odd);
  out.data.traces.push_back(mode_traces(best.op.grid, best.even_set.modes[opts.i_even]));
  out.data.traces.push_back(mode_traces(best.op.grid, best.odd_set.modes[opts.i_odd]));
  if (!satisfies_nondegeneracy(out.data)) {
    throw Error(ErrorCode::NondegeneracyViolated,
                "even mode has equal moduli at M+ and M-; the potential is x1-symmetric");
  }
  return out;
}

}  // namespace winband
