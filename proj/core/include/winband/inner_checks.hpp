#pragma once

// Numerical property checks of the window profiles: harmonicity under
// h-refinement, boundary conditions on the window and the wall, and the
// far-field expansions.

#include <functional>
#include <string>
#include <vector>

#include "winband/inner_layer.hpp"

namespace winband {

using Profile = std::function<double(InnerPoint)>;

/// |5-point Laplacian| of `f` at p for h, h/2, ..., with observed orders
/// log2(res_{i-1} / res_i) (orders[0] is unset).
struct HarmonicityStudy {
  InnerPoint point;
  std::vector<double> h;
  std::vector<double> residual;
  std::vector<double> order;
};

HarmonicityStudy harmonicity_study(const Profile& f, InnerPoint p, double h0 = 0.2,
                                   int levels = 4);

/// max |f| over sample points of the window |xi1| < 1, xi2 = 0.
double window_dirichlet_residual(const Profile& f);

/// max |d f / d xi2| over sample points of the wall |xi1| > 1, xi2 = 0, by a
/// one-sided second-order difference with step h.
double wall_neumann_residual(const Profile& f, double h = 1e-5);

/// Defect d(R) of a far-field expansion along the ray at angle phi, for R,
/// 2R, 4R, ..., with successive ratios d(R)/d(2R).
struct FarFieldStudy {
  double phi = 0.0;
  std::vector<double> radius;
  std::vector<double> defect;
  std::vector<double> ratio;
};

/// X0 - ln r - ln 2 (expected ~ -cos(2 phi) / (4 r^2), ratio 4).
FarFieldStudy potential_far_field(double phi, double r0 = 8.0, int levels = 5);

/// X1 - xi1 + cos(phi) / (2 r) (expected O(r^-3), ratio ~8).
FarFieldStudy dipole_far_field(double phi, double r0 = 8.0, int levels = 5);

/// One row of the profile verification table.
struct ProfileCheck {
  std::string name;
  double dirichlet = 0.0;
  double neumann = 0.0;
  HarmonicityStudy harmonicity;
};

/// X0 (identity argument), X0 with the sine argument, and X1.
std::vector<ProfileCheck> profile_checks();

}  // namespace winband
