#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pgg {

enum class ErrorCode {
  // configuration
  NonPositiveMultiplierOrLEQ1,
  ContributionOutOfRange,
  MissingZeroOrFullContribution,
  NonPositiveEndowment,
  TooFewPlayers,
  ZeroRounds,
  // rules engine
  MissingContribution,
  IllegalAmount,
  RoundIndexMismatch,
  GameAlreadyComplete,
  GameNotComplete,
  // strategies
  EmptyAllowedSet,
  EmptyActionSet,
  UnknownStrategyToken,
  // session protocol
  OutOfPhaseMessage,
  DuplicateContribution,
  UnknownSession,
  MalformedMessage,
  NotJoined,
  AlreadyJoined,
  SessionFull,
  InvalidQuestionnaire,
  DuplicateQuestionnaire,
  SinkUnavailable,
  // logs and analysis
  MalformedLine,
  SchemaVersionMismatch,
  ReplayMismatch,
  NoTrials,
  NoResponses,
  // arithmetic and plumbing
  ArithmeticOverflow,
  DivisionByZero,
  NotRepresentable,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveMultiplierOrLEQ1: return "NonPositiveMultiplierOrLEQ1";
    case ErrorCode::ContributionOutOfRange: return "ContributionOutOfRange";
    case ErrorCode::MissingZeroOrFullContribution: return "MissingZeroOrFullContribution";
    case ErrorCode::NonPositiveEndowment: return "NonPositiveEndowment";
    case ErrorCode::TooFewPlayers: return "TooFewPlayers";
    case ErrorCode::ZeroRounds: return "ZeroRounds";
    case ErrorCode::MissingContribution: return "MissingContribution";
    case ErrorCode::IllegalAmount: return "IllegalAmount";
    case ErrorCode::RoundIndexMismatch: return "RoundIndexMismatch";
    case ErrorCode::GameAlreadyComplete: return "GameAlreadyComplete";
    case ErrorCode::GameNotComplete: return "GameNotComplete";
    case ErrorCode::EmptyAllowedSet: return "EmptyAllowedSet";
    case ErrorCode::EmptyActionSet: return "EmptyActionSet";
    case ErrorCode::UnknownStrategyToken: return "UnknownStrategyToken";
    case ErrorCode::OutOfPhaseMessage: return "OutOfPhaseMessage";
    case ErrorCode::DuplicateContribution: return "DuplicateContribution";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::MalformedMessage: return "MalformedMessage";
    case ErrorCode::NotJoined: return "NotJoined";
    case ErrorCode::AlreadyJoined: return "AlreadyJoined";
    case ErrorCode::SessionFull: return "SessionFull";
    case ErrorCode::InvalidQuestionnaire: return "InvalidQuestionnaire";
    case ErrorCode::DuplicateQuestionnaire: return "DuplicateQuestionnaire";
    case ErrorCode::SinkUnavailable: return "SinkUnavailable";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::ReplayMismatch: return "ReplayMismatch";
    case ErrorCode::NoTrials: return "NoTrials";
    case ErrorCode::NoResponses: return "NoResponses";
    case ErrorCode::ArithmeticOverflow: return "ArithmeticOverflow";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::NotRepresentable: return "NotRepresentable";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

inline std::optional<ErrorCode> parse_error_code(std::string_view text) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::InvalidArgument); ++i) {
    if (to_string(static_cast<ErrorCode>(i)) == text) return static_cast<ErrorCode>(i);
  }
  return std::nullopt;
}

/// Every failure in the library surfaces as a pgg::Error carrying a stable
/// code; the code string is what goes on the wire in `error{code, message}`.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace pgg
