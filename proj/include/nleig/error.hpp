#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nleig {

enum class ErrorCode {
  InvalidArgument,
  OddPointCount,
  NonPositiveLength,
  GridMismatch,
  NonFinite,
  UnderResolved,
  DomainBreach,
  ZeroGradient,
  MonotonicityViolation,
  ConeViolation,
  NotConverged,
  Inadmissible,
  SymbolPole,
  NonPositiveTail,
  EmptyResult,
  InvalidConfig,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OddPointCount: return "OddPointCount";
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::UnderResolved: return "UnderResolved";
    case ErrorCode::DomainBreach: return "DomainBreach";
    case ErrorCode::ZeroGradient: return "ZeroGradient";
    case ErrorCode::MonotonicityViolation: return "MonotonicityViolation";
    case ErrorCode::ConeViolation: return "ConeViolation";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::Inadmissible: return "Inadmissible";
    case ErrorCode::SymbolPole: return "SymbolPole";
    case ErrorCode::NonPositiveTail: return "NonPositiveTail";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace nleig
