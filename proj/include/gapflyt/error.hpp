#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gapflyt {

enum class ErrorCode {
  BehindCamera,
  FrameMismatch,
  NoIntersection,
  InvalidDepth,
  InvalidArgument,
  DimensionMismatch,
  EmptyStack,
  NoGapFound,
  GapTooSmall,
  EmptyGroundTruth,
  EmptyCorners,
  DegenerateFoe,
  NoDivergence,
  EmptyRegion,
  TrackingLost,
  NotAttempted,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code);

// Every failure in the library is reported through this type; callers branch
// on code() rather than on the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::NoIntersection: return "NoIntersection";
    case ErrorCode::InvalidDepth: return "InvalidDepth";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyStack: return "EmptyStack";
    case ErrorCode::NoGapFound: return "NoGapFound";
    case ErrorCode::GapTooSmall: return "GapTooSmall";
    case ErrorCode::EmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::EmptyCorners: return "EmptyCorners";
    case ErrorCode::DegenerateFoe: return "DegenerateFoe";
    case ErrorCode::NoDivergence: return "NoDivergence";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::TrackingLost: return "TrackingLost";
    case ErrorCode::NotAttempted: return "NotAttempted";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace gapflyt
