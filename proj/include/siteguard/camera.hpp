#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "siteguard/skeleton.hpp"

namespace siteguard {

struct CameraParams {
  int id = 0;
  Eigen::Matrix3d intrinsics = Eigen::Matrix3d::Identity();  // K, pixels
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();    // world -> camera
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();     // world -> camera, meters
  int width = 1920;
  int height = 1080;

  Eigen::Vector3d center() const;
  Eigen::Matrix<double, 3, 4> projection_matrix() const;
  // Camera-frame coordinates of a world point.
  Eigen::Vector3d to_camera(const Eigen::Vector3d& x_world) const;
  bool in_image(const Point2D& p) const;
};

// Throws BadCalibration naming the violated invariant.
void validate(const CameraParams& cam);

// Throws BehindCamera when camera-frame z <= 1e-9.
Point2D project(const CameraParams& cam, const Eigen::Vector3d& x_world);

// Calibration JSON: array of {id, K, R, t, width, height, dist}. Distortion
// coefficients must be zero.
std::vector<CameraParams> load_calibration(const std::filesystem::path& path);
std::vector<CameraParams> parse_calibration(const std::string& text);
std::string serialize_calibration(const std::vector<CameraParams>& cams);

}  // namespace siteguard
