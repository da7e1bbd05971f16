#pragma once

// Leading band coefficients near a limiting eigenvalue and the band edges
// they produce.
//
//   log band:        lambda(theta) ~ lambda0 + c1(theta) / ln(eps),
//                    c1 = -(pi/2) |L|^2                  ("lambda01")
//   quadratic band:  lambda(theta) ~ lambda0 + c2(theta) eps^2,
//                    c2 = (pi/8) (|L|^2|L'|^2 - |(L',L)|^2) / |L|^2   ("lambda10")
//
// The second coefficient only exists for multiplicity k >= 2.

#include <optional>
#include <vector>

#include "winband/eigendata.hpp"

namespace winband {

/// -(pi/2) |L|^2. Always <= 0.
double log_band_coefficient(const FunctionalVectors& vectors);

/// (pi/8) (|L|^2|L'|^2 - |(L',L)|^2) / |L|^2. Always >= 0.
/// Throws Error{NotApplicable} for k = 1 and Error{DegenerateL} for |L| ~ 0.
double quadratic_band_coefficient(const FunctionalVectors& vectors);

/// Coefficient value and its theta-derivative, evaluated analytically.
struct CoefficientSample {
  double value = 0.0;
  double derivative = 0.0;
};

CoefficientSample log_band_coefficient_at(const CellEigenData& data, double theta);
CoefficientSample quadratic_band_coefficient_at(const CellEigenData& data, double theta);

struct BandCoefficients {
  CellEigenData data;
  std::vector<double> thetas;
  std::vector<double> lambda01;
  /// Empty when k = 1.
  std::vector<double> lambda10;
};

/// Uniform grid theta_m = 2 pi m / n_samples. Every 16th node cross-checks
/// the quadratic coefficient against the basis-rotation route.
BandCoefficients sample_bands(const CellEigenData& data, int n_samples = 1024);

enum class BandOrder { log_band, quadratic_band };
enum class ExtremumLocation { endpoints_or_center, interior_points };

struct BandInterval {
  BandOrder order = BandOrder::log_band;
  /// Lambda^- and Lambda^+ of the band (lower <= upper).
  double lower_coeff = 0.0;
  double upper_coeff = 0.0;
  /// Quasi-momenta in [0, 2 pi) where the lower / upper band edge is attained.
  std::vector<double> arg_lower;
  std::vector<double> arg_upper;
  ExtremumLocation classification = ExtremumLocation::endpoints_or_center;
};

/// Extracts the band edge coefficients, refining each extremum by golden
/// section followed by a derivative-sign bisection polish.
std::vector<BandInterval> band_intervals(const BandCoefficients& coeffs,
                                         double refine_tol = 1e-8);

struct EnergyInterval {
  double lower = 0.0;
  double upper = 0.0;
};

struct BandEdges {
  double epsilon = 0.0;
  EnergyInterval log_band;
  std::optional<EnergyInterval> quadratic_band;
  /// Distance from the top of the quadratic band to the bottom of the log band.
  std::optional<double> gap;
  /// gap / (Lambda1^- / |ln eps|): the gap as a fraction of the distance from
  /// lambda0 to the log band; tends to 1 as eps -> 0.
  std::optional<double> relative_gap;
  /// Largest eps below which the two leading-order intervals stay disjoint.
  std::optional<double> disjoint_threshold;
  /// Set when the leading-order intervals intersect at this epsilon.
  bool overlap = false;
};

/// Leading-order band positions at a given window size 0 < eps < 1. Error
/// terms are not included.
BandEdges band_edges_at_epsilon(const std::vector<BandInterval>& intervals, double lambda0,
                                double epsilon);

const char* to_string(BandOrder order);
const char* to_string(ExtremumLocation loc);

}  // namespace winband
