#include "zspa/error.hpp"

namespace zspa {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyPrompt: return "EmptyPrompt";
    case ErrorCode::EmptyVisual: return "EmptyVisual";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::PoolExhausted: return "PoolExhausted";
    case ErrorCode::RatioOutOfRange: return "RatioOutOfRange";
    case ErrorCode::BudgetZero: return "BudgetZero";
    case ErrorCode::RateOutOfRange: return "RateOutOfRange";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DegenerateParams: return "DegenerateParams";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::BadVersion: return "BadVersion";
    case ErrorCode::BadDtype: return "BadDtype";
    case ErrorCode::BadShape: return "BadShape";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::TrailingData: return "TrailingData";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace zspa
