#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zspa {

enum class ErrorCode {
  EmptyPrompt,
  EmptyVisual,
  DimensionMismatch,
  KOutOfRange,
  PoolExhausted,
  RatioOutOfRange,
  BudgetZero,
  RateOutOfRange,
  InvalidConfig,
  DegenerateParams,
  BadMagic,
  BadVersion,
  BadDtype,
  BadShape,
  TruncatedPayload,
  TrailingData,
  NonFiniteValue,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the engine. The code is stable and is what
/// bindings and the CLI map onto their own error channels.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace zspa
