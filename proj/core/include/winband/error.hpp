#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace winband {

enum class ErrorCode {
  Validation,
  NondegeneracyViolated,
  DegenerateL,
  DegenerateFirstFunctional,
  NotPositiveDefinite,
  ConstraintResidual,
  NotApplicable,
  DomainError,
  GridError,
  NoConvergence,
  ClusterAmbiguity,
  NoCrossing,
  ResolutionError,
  TrendViolation,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code identifies the failure
/// class and `theta()` carries the quasi-momentum when one is relevant.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::optional<double> theta = std::nullopt)
      : std::runtime_error(what), code_(code), theta_(theta) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<double> theta() const noexcept { return theta_; }

 private:
  ErrorCode code_;
  std::optional<double> theta_;
};

}  // namespace winband
