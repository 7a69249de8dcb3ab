#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lcoal {

enum class ErrorCode {
  ToleranceNotMet,
  ZeroTotalRate,
  ZeroRate,
  SizeOverflow,
  DimensionTooLow,
  ZeroRateDeadlock,
  GroundSetMismatch,
  IncompatibleVariants,
  BudgetExceeded,
  TruncationUnstable,
  ParseError,
  ValidationError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lcoal
