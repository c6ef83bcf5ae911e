#pragma once

#include <vector>

#include <Eigen/Geometry>

#include "siteguard/camera.hpp"

namespace siteguard {

// Cameras sit on a semicircle (radius per camera spread over
// [radius_min, radius_max]) around a scene center, all aimed at the center
// at target_height.
struct CameraRigSpec {
  int count = 4;
  double radius_min = 4.0;
  double radius_max = 7.0;
  double height = 2.0;
  double fov_deg = 80.0;  // horizontal
  int width = 1920;
  int image_height = 1080;
  double target_height = 1.0;
};

void validate(const CameraRigSpec& spec);

// Azimuth of each camera id around the scene center in the scene frame
// (0 = front, cameras ordered by increasing |azimuth|, negative side first).
std::vector<double> rig_azimuths_deg(int count);

// Scene frame: origin on the ground at the scene center, z up, the front of
// the rig on the -y side. World frame: origin on the ground below camera 0,
// y toward the scene center, z up.
Eigen::Isometry3d scene_to_world(const CameraRigSpec& spec);

// Camera center of id `k` in scene coordinates.
Eigen::Vector3d camera_position_scene(const CameraRigSpec& spec, int k);

std::vector<CameraParams> build_rig(const CameraRigSpec& spec);

}  // namespace siteguard
