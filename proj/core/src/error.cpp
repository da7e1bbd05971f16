#include "winband/error.hpp"

namespace winband {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Validation: return "ValidationError";
    case ErrorCode::NondegeneracyViolated: return "NondegeneracyViolated";
    case ErrorCode::DegenerateL: return "DegenerateL";
    case ErrorCode::DegenerateFirstFunctional: return "DegenerateFirstFunctional";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::ConstraintResidual: return "ConstraintResidual";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::GridError: return "GridError";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ClusterAmbiguity: return "ClusterAmbiguity";
    case ErrorCode::NoCrossing: return "NoCrossing";
    case ErrorCode::ResolutionError: return "ResolutionError";
    case ErrorCode::TrendViolation: return "TrendViolation";
    case ErrorCode::Io: return "IoError";
  }
  return "UnknownError";
}

}  // namespace winband
