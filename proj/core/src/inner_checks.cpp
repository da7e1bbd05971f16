#include "winband/inner_checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace winband {

HarmonicityStudy harmonicity_study(const Profile& f, InnerPoint p, double h0, int levels) {
  HarmonicityStudy out;
  out.point = p;
  double h = h0;
  for (int i = 0; i < levels; ++i, h *= 0.5) {
    const double lap = f({p.xi1 + h, p.xi2}) + f({p.xi1 - h, p.xi2}) + f({p.xi1, p.xi2 + h}) +
                       f({p.xi1, p.xi2 - h}) - 4.0 * f(p);
    out.h.push_back(h);
    out.residual.push_back(std::abs(lap) / (h * h));
    out.order.push_back(i == 0 ? std::nan("")
                               : std::log2(out.residual[i - 1] / out.residual[i]));
  }
  return out;
}

double window_dirichlet_residual(const Profile& f) {
  double worst = 0.0;
  for (double x : {-0.9, -0.6, -0.25, 0.0, 0.3, 0.5, 0.75, 0.95}) {
    worst = std::max(worst, std::abs(f({x, 0.0})));
  }
  return worst;
}

double wall_neumann_residual(const Profile& f, double h) {
  double worst = 0.0;
  for (double x : {-5.0, -3.0, -2.0, -1.5, 1.5, 2.0, 3.0, 5.0}) {
    const double d = (-3.0 * f({x, 0.0}) + 4.0 * f({x, h}) - f({x, 2.0 * h})) / (2.0 * h);
    worst = std::max(worst, std::abs(d));
  }
  return worst;
}

namespace {

FarFieldStudy far_field(double phi, double r0, int levels,
                        const std::function<double(double r)>& defect) {
  FarFieldStudy out;
  out.phi = phi;
  double r = r0;
  for (int i = 0; i < levels; ++i, r *= 2.0) {
    out.radius.push_back(r);
    out.defect.push_back(defect(r));
    out.ratio.push_back(i == 0 ? std::nan("") : out.defect[i - 1] / out.defect[i]);
  }
  return out;
}

}  // namespace

FarFieldStudy potential_far_field(double phi, double r0, int levels) {
  return far_field(phi, r0, levels, [phi](double r) {
    const InnerPoint p{r * std::cos(phi), r * std::sin(phi)};
    return window_potential(p) - std::log(r) - std::numbers::ln2;
  });
}

FarFieldStudy dipole_far_field(double phi, double r0, int levels) {
  return far_field(phi, r0, levels, [phi](double r) {
    const InnerPoint p{r * std::cos(phi), r * std::sin(phi)};
    return window_dipole(p) - p.xi1 + std::cos(phi) / (2.0 * r);
  });
}

std::vector<ProfileCheck> profile_checks() {
  const InnerPoint interior{0.7, 1.3};
  const std::vector<std::pair<std::string, Profile>> profiles = {
      {"X0", [](InnerPoint p) { return window_potential(p); }},
      {"X0[sin z]", [](InnerPoint p) { return window_potential(p, ProfileArgument::sine); }},
      {"X1", [](InnerPoint p) { return window_dipole(p); }},
  };
  std::vector<ProfileCheck> out;
  for (const auto& [name, f] : profiles) {
    out.push_back({name, window_dirichlet_residual(f), wall_neumann_residual(f),
                   harmonicity_study(f, interior)});
  }
  return out;
}

}  // namespace winband
