#pragma once

#include <cstdint>
#include <vector>

#include "siteguard/association.hpp"
#include "siteguard/camera.hpp"
#include "siteguard/detection.hpp"
#include "siteguard/scene.hpp"

namespace siteguard {

// True if the segment from `from` to `to` (scene frame) crosses the wall.
bool segment_hits_wall(const Eigen::Vector3d& from, const Eigen::Vector3d& to, const OccluderWall& wall);

// Projects true geometry into every camera and corrupts it with noise,
// dropout and occlusion. Each frame draws from its own (seed, frame, camera)
// substream, so the serial and parallel paths agree exactly.
std::vector<DetectionRecord> render_detections(const std::vector<FrameState>& trajectory,
                                               const std::vector<CameraParams>& cameras, const ScenarioSpec& spec,
                                               Execution exec = Execution::parallel);

}  // namespace siteguard
