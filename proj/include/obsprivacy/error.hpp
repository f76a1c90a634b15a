#pragma once

#include <stdexcept>
#include <string>

namespace obsprivacy {

enum class ErrorCode {
  DisconnectedGraph,
  InfeasibleBounds,
  DuplicateEdge,
  SelfLoop,
  IndexOutOfRange,
  DimensionMismatch,
  NonSymmetricInput,
  NegativeTime,
  InvalidWindow,
  StaleCache,
  NonPositivePerturbation,
  NonPositiveHorizon,
  NonPositiveStep,
  InfeasibleSet,
  NonSPDMetric,
  SingularAccumulator,
  EmptyEdgeSet,
  EmptyIntruderSet,
  MissingHindsight,
  ScheduleOutOfRange,
  EmptyTrace,
  SyntaxError,
  ValidationError,
  IoError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::InfeasibleBounds: return "InfeasibleBounds";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonSymmetricInput: return "NonSymmetricInput";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::StaleCache: return "StaleCache";
    case ErrorCode::NonPositivePerturbation: return "NonPositivePerturbation";
    case ErrorCode::NonPositiveHorizon: return "NonPositiveHorizon";
    case ErrorCode::NonPositiveStep: return "NonPositiveStep";
    case ErrorCode::InfeasibleSet: return "InfeasibleSet";
    case ErrorCode::NonSPDMetric: return "NonSPDMetric";
    case ErrorCode::SingularAccumulator: return "SingularAccumulator";
    case ErrorCode::EmptyEdgeSet: return "EmptyEdgeSet";
    case ErrorCode::EmptyIntruderSet: return "EmptyIntruderSet";
    case ErrorCode::MissingHindsight: return "MissingHindsight";
    case ErrorCode::ScheduleOutOfRange: return "ScheduleOutOfRange";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Scenario-file failures. `line` is 0 when the error is not tied to a line.
class ScenarioError : public Error {
 public:
  ScenarioError(ErrorCode code, std::string field, std::string reason, int line = 0)
      : Error(code, format(field, reason, line)),
        field_(std::move(field)),
        reason_(std::move(reason)),
        line_(line) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& field, const std::string& reason, int line) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    out += field + ": " + reason;
    return out;
  }

  std::string field_;
  std::string reason_;
  int line_;
};

}  // namespace obsprivacy
