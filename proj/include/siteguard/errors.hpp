#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace siteguard {

enum class ErrorCode {
  DegenerateBaseline,
  InsufficientViews,
  DegenerateGeometry,
  BehindCamera,
  MismatchedCameraCount,
  NonMonotonicFrame,
  UnknownScenario,
  BadCalibration,
  MalformedRecord,
  FrameRangeMismatch,
  FrameNotFound,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code);

// All recoverable input/geometry failures surface as this type. Broken
// internal invariants use std::logic_error instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace siteguard
