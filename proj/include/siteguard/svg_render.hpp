#pragma once

#include <string>

#include "siteguard/camera.hpp"
#include "siteguard/json_io.hpp"

namespace siteguard {

inline constexpr const char* kCompliantColor = "#2e7d32";
inline constexpr const char* kViolationColor = "#c62828";
inline constexpr const char* kObjectColor = "#1565c0";

// SVG of one camera's view of a tracks dump at `frame`. Throws FrameNotFound
// when the frame lies outside the dump's frame range.
std::string render_reprojection(const Json& dump, const CameraParams& cam, int frame);

}  // namespace siteguard
