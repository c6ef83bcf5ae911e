#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "siteguard/camera.hpp"
#include "siteguard/skeleton.hpp"

namespace siteguard {

struct CrossViewSelection;

struct Observation {
  const CameraParams* camera;
  Point2D point;
};

// Unweighted DLT. Throws InsufficientViews (<2 observations) or
// DegenerateGeometry (parallel rays, ambiguous null space, point at infinity).
Eigen::Vector3d triangulate_point(const std::vector<Observation>& observations);

// Joint j present iff present in >= 2 member views. Throws InsufficientViews
// when no joint qualifies. `cameras` is indexed by camera id.
Pose3D triangulate_worker(const CrossViewSelection& selection, const std::vector<CameraParams>& cameras);

ObjectPoint3D triangulate_object(const CrossViewSelection& selection, const std::vector<CameraParams>& cameras);

}  // namespace siteguard
