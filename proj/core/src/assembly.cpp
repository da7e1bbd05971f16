#include "assembly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <type_traits>

#include "winband/error.hpp"

namespace winband::detail {

std::vector<double> dual_lengths(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = x[i + 1] - x[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

void check_grid(const TensorGrid& grid, const PotentialFn& potential, bool need_midline) {
  if (grid.nx() < 16 || grid.ny() < 16) {
    throw Error(ErrorCode::GridError, "grid needs at least 16 intervals in each direction");
  }
  const auto increasing = [](const std::vector<double>& v) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      if (!(v[i + 1] > v[i])) return false;
    }
    return true;
  };
  if (!increasing(grid.x1) || !increasing(grid.x2)) {
    throw Error(ErrorCode::GridError, "grid coordinates must be strictly increasing");
  }
  if (grid.x1.front() != 0.0 || grid.x1.back() != 1.0) {
    throw Error(ErrorCode::GridError, "x1 nodes must span exactly [0, 1]");
  }
  if (need_midline && grid.midline() < 0) {
    throw Error(ErrorCode::GridError, "no grid row on x2 = 0; M+ and M- must be nodes");
  }
  for (double y : grid.x2) {
    const double left = potential(0.0, y);
    const double right = potential(1.0, y);
    if (!std::isfinite(left) || !std::isfinite(right) ||
        std::abs(left - right) > 1e-10 * (1.0 + std::abs(left))) {
      std::ostringstream msg;
      msg << "potential is not 1-periodic in x1 at x2 = " << y << " (" << left << " vs "
          << right << ")";
      throw Error(ErrorCode::GridError, msg.str());
    }
  }
}

std::vector<Eigen::Index> reflection_map(const TensorGrid& grid,
                                         const std::vector<Eigen::Index>& unknown_of_node) {
  if (!grid.symmetric_x2()) return {};
  Eigen::Index count = 0;
  for (Eigen::Index u : unknown_of_node) count = std::max(count, u + 1);
  std::vector<Eigen::Index> mirror(count, -1);
  const int ny = grid.ny();
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= grid.nx(); ++i) {
      mirror[unknown_of_node[grid.node(i, j)]] = unknown_of_node[grid.node(i, ny - j)];
    }
  }
  return mirror;
}

template <class Scalar>
AssembledForm<Scalar> assemble_form(const TensorGrid& grid, const PotentialFn& potential,
                                    const std::optional<SideCoupling>& coupling) {
  const int nx = grid.nx();
  const int ny = grid.ny();
  const auto w1 = dual_lengths(grid.x1);
  const auto w2 = dual_lengths(grid.x2);

  AssembledForm<Scalar> form;
  const Eigen::Index nodes = grid.num_nodes();
  form.unknown_of_node.assign(nodes, -1);
  form.factor_of_node.assign(nodes, Scalar(1.0));

  Scalar side_phase(1.0);
  if (coupling) {
    if constexpr (std::is_same_v<Scalar, double>) {
      side_phase = std::cos(coupling->theta);
    } else {
      side_phase = std::polar(1.0, coupling->theta);
    }
  }
  const auto coupled = [&](int j) {
    return coupling && (coupling->whole_edge || std::abs(grid.x2[j]) < coupling->epsilon);
  };

  Eigen::Index next = 0;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      if (i == nx && coupled(j)) continue;
      form.unknown_of_node[grid.node(i, j)] = next++;
    }
  }
  for (int j = 0; j <= ny; ++j) {
    if (!coupled(j)) continue;
    form.unknown_of_node[grid.node(nx, j)] = form.unknown_of_node[grid.node(0, j)];
    form.factor_of_node[grid.node(nx, j)] = side_phase;
  }

  Eigen::VectorXd mass = Eigen::VectorXd::Zero(next);
  Eigen::VectorXd diag_potential = Eigen::VectorXd::Zero(next);
  form.potential_min = INFINITY;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const Eigen::Index node = grid.node(i, j);
      const Eigen::Index u = form.unknown_of_node[node];
      const double m = w1[i] * w2[j];
      const double v = potential(grid.x1[i], grid.x2[j]);
      form.potential_min = std::min(form.potential_min, v);
      mass[u] += m;
      diag_potential[u] += m * v;
    }
  }

  const Eigen::VectorXd scale = mass.array().rsqrt();
  std::vector<Eigen::Triplet<Scalar>> triplets;
  triplets.reserve(static_cast<std::size_t>(5 * next));
  for (Eigen::Index u = 0; u < next; ++u) {
    triplets.emplace_back(u, u, Scalar(diag_potential[u] * scale[u] * scale[u]));
  }
  const auto add_edge = [&](Eigen::Index na, Eigen::Index nb, double coef) {
    const Eigen::Index a = form.unknown_of_node[na];
    const Eigen::Index b = form.unknown_of_node[nb];
    const Scalar fa = form.factor_of_node[na];
    const Scalar fb = form.factor_of_node[nb];
    const double sa = scale[a] * scale[a];
    const double sb = scale[b] * scale[b];
    const double sab = scale[a] * scale[b];
    if (a == b) {
      // both ends on the same unknown: |fa - fb|^2 |u|^2
      triplets.emplace_back(a, a, Scalar(coef * std::norm(fa - fb) * sa));
      return;
    }
    triplets.emplace_back(a, a, Scalar(coef * std::norm(fa) * sa));
    triplets.emplace_back(b, b, Scalar(coef * std::norm(fb) * sb));
    Scalar off;
    if constexpr (std::is_same_v<Scalar, double>) {
      off = -coef * fa * fb;
    } else {
      off = -coef * std::conj(fa) * fb;
    }
    triplets.emplace_back(a, b, off * sab);
    if constexpr (std::is_same_v<Scalar, double>) {
      triplets.emplace_back(b, a, off * sab);
    } else {
      triplets.emplace_back(b, a, std::conj(off) * sab);
    }
  };

  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      add_edge(grid.node(i, j), grid.node(i + 1, j), w2[j] / (grid.x1[i + 1] - grid.x1[i]));
    }
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      add_edge(grid.node(i, j), grid.node(i, j + 1), w1[i] / (grid.x2[j + 1] - grid.x2[j]));
    }
  }

  form.matrix.resize(next, next);
  form.matrix.setFromTriplets(triplets.begin(), triplets.end());
  form.matrix.makeCompressed();
  form.mass = std::move(mass);
  return form;
}

template AssembledForm<double> assemble_form(const TensorGrid&, const PotentialFn&,
                                             const std::optional<SideCoupling>&);
template AssembledForm<std::complex<double>> assemble_form(const TensorGrid&, const PotentialFn&,
                                                           const std::optional<SideCoupling>&);

}  // namespace winband::detail
