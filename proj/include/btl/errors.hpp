#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace btl {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  Infeasible,
  DisconnectedGraph,
  Diverged,
  NotConverged,
  ReducibleChain,
  DegreeOverflow,
  Io,
  Parse,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::ReducibleChain: return "ReducibleChain";
    case ErrorCode::DegreeOverflow: return "DegreeOverflow";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code; the
/// CLI prints `to_string(code())` so scripts can match on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace btl
