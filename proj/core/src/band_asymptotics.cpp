#include "winband/band_asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "winband/basis_rotation.hpp"
#include "winband/error.hpp"

namespace winband {

namespace {

using std::numbers::pi;
constexpr double kTwoPi = 2.0 * pi;
constexpr double kExtremumEqualRelTol = 1e-10;
constexpr int kCrossCheckStride = 16;

struct VectorsAndDerivatives {
  Eigen::VectorXcd L, dL, Lp, dLp;
};

VectorsAndDerivatives vectors_with_derivatives(const CellEigenData& data, double theta) {
  const auto k = static_cast<Eigen::Index>(data.traces.size());
  VectorsAndDerivatives v{Eigen::VectorXcd(k), Eigen::VectorXcd(k), Eigen::VectorXcd(k),
                          Eigen::VectorXcd(k)};
  const cplx ph = std::polar(1.0, -theta);
  const cplx dph = cplx(0.0, -1.0) * ph;
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& t = data.traces[static_cast<std::size_t>(j)];
    v.L[j] = t.value_plus * ph - t.value_minus;
    v.dL[j] = t.value_plus * dph;
    v.Lp[j] = t.deriv_plus * ph + t.deriv_minus;
    v.dLp[j] = t.deriv_plus * dph;
  }
  return v;
}

double wrap(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

double periodic_distance(double a, double b) {
  const double d = std::abs(wrap(a - b));
  return std::min(d, kTwoPi - d);
}

using Evaluator = CoefficientSample (*)(const CellEigenData&, double);

// Maximizes sign * f on [lo, hi] by golden section, then polishes with a
// bisection on the sign of the analytic derivative.
double refine_extremum(const CellEigenData& data, Evaluator f, double sign, double lo, double hi,
                       double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = sign * f(data, c).value;
  double fd = sign * f(data, d).value;
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = sign * f(data, c).value;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = sign * f(data, d).value;
    }
  }
  double best = 0.5 * (a + b);

  // Function values near an extremum are flat to ~sqrt(machine eps); the
  // derivative is not, so it pins the location much more tightly.
  const double half = std::max(100.0 * tol, 1e-7);
  double l = std::max(lo, best - half);
  double r = std::min(hi, best + half);
  double gl = sign * f(data, l).derivative;
  double gr = sign * f(data, r).derivative;
  if (gl > 0.0 && gr < 0.0) {
    for (int it = 0; it < 200 && r - l > 1e-15 * (1.0 + std::abs(best)); ++it) {
      const double m = 0.5 * (l + r);
      const double gm = sign * f(data, m).derivative;
      if (gm > 0.0) {
        l = m;
      } else {
        r = m;
      }
    }
    best = 0.5 * (l + r);
  }
  return best;
}

struct Extremum {
  double value = 0.0;
  std::vector<double> args;
};

// Global extremum (sign = +1 max, -1 min) of a sampled periodic function,
// with every global extremizer reported.
Extremum global_extremum(const CellEigenData& data, Evaluator f, const std::vector<double>& thetas,
                         const std::vector<double>& samples, double sign, double tol) {
  const std::size_t n = samples.size();
  const double h = kTwoPi / static_cast<double>(n);
  double scale = 0.0, smax = -INFINITY, smin = INFINITY;
  for (double s : samples) {
    scale = std::max(scale, std::abs(s));
    smax = std::max(smax, s);
    smin = std::min(smin, s);
  }
  if (smax - smin <= 1e-13 * scale) {
    return {sign > 0 ? smax : smin, {0.0}};
  }

  struct Candidate {
    double arg, value;
  };
  std::vector<Candidate> candidates;
  for (std::size_t m = 0; m < n; ++m) {
    const double here = sign * samples[m];
    const double left = sign * samples[(m + n - 1) % n];
    const double right = sign * samples[(m + 1) % n];
    if (here >= left && here > right) {
      const double arg = refine_extremum(data, f, sign, thetas[m] - h, thetas[m] + h, tol);
      candidates.push_back({wrap(arg), sign * f(data, arg).value});
    }
  }

  double best = -INFINITY;
  for (const auto& c : candidates) best = std::max(best, c.value);
  const double cutoff = best - kExtremumEqualRelTol * std::max(scale, 1e-300);

  Extremum out{sign * best, {}};
  for (const auto& c : candidates) {
    if (c.value < cutoff) continue;
    const bool duplicate = std::any_of(out.args.begin(), out.args.end(), [&](double a) {
      return periodic_distance(a, c.arg) < 10.0 * tol;
    });
    if (!duplicate) out.args.push_back(c.arg);
  }
  std::sort(out.args.begin(), out.args.end());
  return out;
}

ExtremumLocation classify(const std::vector<double>& args, double tol) {
  for (double a : args) {
    const double d = std::min({std::abs(a), std::abs(a - pi), std::abs(a - kTwoPi)});
    if (d > 10.0 * tol) return ExtremumLocation::interior_points;
  }
  return ExtremumLocation::endpoints_or_center;
}

}  // namespace

double log_band_coefficient(const FunctionalVectors& vectors) {
  return -0.5 * pi * vectors.norm2_L();
}

double quadratic_band_coefficient(const FunctionalVectors& vectors) {
  if (vectors.L.size() < 2) {
    throw Error(ErrorCode::NotApplicable,
                "the quadratic band coefficient needs multiplicity k >= 2", vectors.theta);
  }
  const double n2 = vectors.norm2_L();
  if (!(n2 > 0.0)) {
    throw Error(ErrorCode::DegenerateL, "L vanishes; quadratic band coefficient undefined",
                vectors.theta);
  }
  return pi / 8.0 * vectors.gram_determinant() / n2;
}

CoefficientSample log_band_coefficient_at(const CellEigenData& data, double theta) {
  const auto v = vectors_with_derivatives(data, theta);
  const double dA = 2.0 * v.L.dot(v.dL).real();
  return {-0.5 * pi * v.L.squaredNorm(), -0.5 * pi * dA};
}

CoefficientSample quadratic_band_coefficient_at(const CellEigenData& data, double theta) {
  const auto v = vectors_with_derivatives(data, theta);
  const double A = v.L.squaredNorm();
  const double B = v.Lp.squaredNorm();
  const cplx C = v.L.dot(v.Lp);  // (L', L)
  const double dA = 2.0 * v.L.dot(v.dL).real();
  const double dB = 2.0 * v.Lp.dot(v.dLp).real();
  const cplx dC = v.L.dot(v.dLp) + v.dL.dot(v.Lp);
  const double N = A * B - std::norm(C);
  const double dN = dA * B + A * dB - 2.0 * (std::conj(C) * dC).real();
  return {pi / 8.0 * N / A, pi / 8.0 * (dN * A - N * dA) / (A * A)};
}

BandCoefficients sample_bands(const CellEigenData& data, int n_samples) {
  if (n_samples < 16) {
    throw Error(ErrorCode::Validation, "sample_bands: n_samples must be at least 16");
  }
  validate_structure(data);
  const int k = data.multiplicity();
  BandCoefficients out;
  out.data = data;
  out.thetas.resize(n_samples);
  out.lambda01.resize(n_samples);
  if (k >= 2) out.lambda10.resize(n_samples);

  for (int m = 0; m < n_samples; ++m) {
    const double theta = kTwoPi * m / n_samples;
    out.thetas[m] = theta;
    if (k == 1) {
      out.lambda01[m] = log_band_coefficient(evaluate_functionals(data, theta));
      continue;
    }
    const auto fv = functional_vectors(data, theta);
    out.lambda01[m] = log_band_coefficient(fv);
    out.lambda10[m] = quadratic_band_coefficient(fv);
    if (m % kCrossCheckStride == 0) {
      const auto rot = rotate_basis(data, theta);
      const double via_rotation =
          pi / 8.0 * std::norm(l_theta_prime(rot.rotated_traces[1], theta));
      const double diff = std::abs(via_rotation - out.lambda10[m]);
      if (diff > 1e-9 * std::max(1.0, std::abs(out.lambda10[m]))) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "quadratic coefficient cross-check failed at theta = " << theta << ": formula "
            << out.lambda10[m] << ", rotation " << via_rotation;
        throw Error(ErrorCode::ConstraintResidual, msg.str(), theta);
      }
    }
  }
  return out;
}

std::vector<BandInterval> band_intervals(const BandCoefficients& coeffs, double refine_tol) {
  std::vector<BandInterval> out;

  {
    // lower edge Lambda1- = -max(lambda01), upper edge Lambda1+ = -min(lambda01)
    const auto mx = global_extremum(coeffs.data, log_band_coefficient_at, coeffs.thetas,
                                    coeffs.lambda01, +1.0, refine_tol);
    const auto mn = global_extremum(coeffs.data, log_band_coefficient_at, coeffs.thetas,
                                    coeffs.lambda01, -1.0, refine_tol);
    BandInterval band;
    band.order = BandOrder::log_band;
    band.lower_coeff = -mx.value;
    band.upper_coeff = -mn.value;
    band.arg_lower = mx.args;
    band.arg_upper = mn.args;
    auto all = mx.args;
    all.insert(all.end(), mn.args.begin(), mn.args.end());
    band.classification = classify(all, refine_tol);
    out.push_back(std::move(band));
  }

  if (!coeffs.lambda10.empty()) {
    const auto mn = global_extremum(coeffs.data, quadratic_band_coefficient_at, coeffs.thetas,
                                    coeffs.lambda10, -1.0, refine_tol);
    const auto mx = global_extremum(coeffs.data, quadratic_band_coefficient_at, coeffs.thetas,
                                    coeffs.lambda10, +1.0, refine_tol);
    BandInterval band;
    band.order = BandOrder::quadratic_band;
    band.lower_coeff = mn.value;
    band.upper_coeff = mx.value;
    band.arg_lower = mn.args;
    band.arg_upper = mx.args;
    auto all = mn.args;
    all.insert(all.end(), mx.args.begin(), mx.args.end());
    band.classification = classify(all, refine_tol);
    out.push_back(std::move(band));
  }
  return out;
}

BandEdges band_edges_at_epsilon(const std::vector<BandInterval>& intervals, double lambda0,
                                double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::Validation, "band_edges_at_epsilon: epsilon must lie in (0, 1)");
  }
  const BandInterval* logb = nullptr;
  const BandInterval* quad = nullptr;
  for (const auto& b : intervals) {
    (b.order == BandOrder::log_band ? logb : quad) = &b;
  }
  if (logb == nullptr) {
    throw Error(ErrorCode::Validation, "band_edges_at_epsilon: no log band supplied");
  }

  const double inv_log = 1.0 / std::abs(std::log(epsilon));
  BandEdges edges;
  edges.epsilon = epsilon;
  edges.log_band = {lambda0 + logb->lower_coeff * inv_log, lambda0 + logb->upper_coeff * inv_log};
  if (quad == nullptr) return edges;

  const double e2 = epsilon * epsilon;
  edges.quadratic_band = EnergyInterval{lambda0 + quad->lower_coeff * e2,
                                        lambda0 + quad->upper_coeff * e2};
  edges.gap = edges.log_band.lower - edges.quadratic_band->upper;
  edges.overlap = !(*edges.gap > 0.0);
  if (logb->lower_coeff > 0.0) edges.relative_gap = *edges.gap / (logb->lower_coeff * inv_log);

  // First root of Lambda1-/|ln e| - Lambda2+ e^2 on (0, 1); the function is
  // positive near both ends, so scan in log(e) and bisect the first crossing.
  const auto separation = [&](double e) {
    return logb->lower_coeff / std::abs(std::log(e)) - quad->upper_coeff * e * e;
  };
  double threshold = 1.0;
  const int n_scan = 4000;
  const double log_lo = std::log(1e-16), log_hi = std::log(1.0 - 1e-12);
  double prev_e = std::exp(log_lo);
  for (int i = 1; i <= n_scan; ++i) {
    const double e = std::exp(log_lo + (log_hi - log_lo) * i / n_scan);
    if (separation(e) <= 0.0) {
      double lo = prev_e, hi = e;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (separation(mid) > 0.0 ? lo : hi) = mid;
      }
      threshold = lo;
      break;
    }
    prev_e = e;
  }
  edges.disjoint_threshold = threshold;
  return edges;
}

const char* to_string(BandOrder order) {
  return order == BandOrder::log_band ? "log_band" : "quadratic_band";
}

const char* to_string(ExtremumLocation loc) {
  return loc == ExtremumLocation::endpoints_or_center ? "endpoints_or_center" : "interior_points";
}

}  // namespace winband
