#include "lcoal/error.hpp"

namespace lcoal {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ToleranceNotMet: return "TOLERANCE_NOT_MET";
    case ErrorCode::ZeroTotalRate: return "ZERO_TOTAL_RATE";
    case ErrorCode::ZeroRate: return "ZERO_RATE";
    case ErrorCode::SizeOverflow: return "SIZE_OVERFLOW";
    case ErrorCode::DimensionTooLow: return "DIMENSION_TOO_LOW";
    case ErrorCode::ZeroRateDeadlock: return "ZERO_RATE_DEADLOCK";
    case ErrorCode::GroundSetMismatch: return "GROUND_SET_MISMATCH";
    case ErrorCode::IncompatibleVariants: return "INCOMPATIBLE_VARIANTS";
    case ErrorCode::BudgetExceeded: return "BUDGET_EXCEEDED";
    case ErrorCode::TruncationUnstable: return "TRUNCATION_UNSTABLE";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::ValidationError: return "VALIDATION_ERROR";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
  }
  return "UNKNOWN";
}

}  // namespace lcoal
