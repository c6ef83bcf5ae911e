#include "siteguard/errors.hpp"

namespace siteguard {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateBaseline: return "DegenerateBaseline";
    case ErrorCode::InsufficientViews: return "InsufficientViews";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::MismatchedCameraCount: return "MismatchedCameraCount";
    case ErrorCode::NonMonotonicFrame: return "NonMonotonicFrame";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::BadCalibration: return "BadCalibration";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::FrameRangeMismatch: return "FrameRangeMismatch";
    case ErrorCode::FrameNotFound: return "FrameNotFound";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace siteguard
