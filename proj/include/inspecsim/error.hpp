#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace inspecsim {

enum class ErrorCode {
  InvalidInput,
  InfeasibleStandoff,
  EmptyPlan,
  NoRouteFound,
  OutOfRange,
  NoAutonomousSegment,
  DegenerateGeometry,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InfeasibleStandoff: return "InfeasibleStandoff";
    case ErrorCode::EmptyPlan: return "EmptyPlan";
    case ErrorCode::NoRouteFound: return "NoRouteFound";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NoAutonomousSegment: return "NoAutonomousSegment";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Process exit status for a failure with this code. 0 is success and 1 an
/// incomplete mission; the rest are distinct per failure class.
constexpr int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput:
    case ErrorCode::OutOfRange:
    case ErrorCode::DegenerateGeometry: return 2;
    case ErrorCode::InfeasibleStandoff:
    case ErrorCode::EmptyPlan:
    case ErrorCode::NoRouteFound: return 3;
    case ErrorCode::NoAutonomousSegment: return 4;
    case ErrorCode::Io: return 5;
  }
  return 2;
}

/// Exception carrying a machine-readable code; the CLI maps it to an exit
/// status and a JSON error document.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace inspecsim
