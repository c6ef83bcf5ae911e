#include "siteguard/rig.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "siteguard/errors.hpp"

namespace siteguard {

void validate(const CameraRigSpec& spec) {
  const auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, "rig: " + msg); };
  if (spec.count < 1) fail("count must be >= 1");
  if (!(spec.radius_min > 0.0) || !(spec.radius_max >= spec.radius_min)) fail("need 0 < radius_min <= radius_max");
  if (!(spec.fov_deg > 0.0 && spec.fov_deg < 180.0)) fail("fov_deg must lie in (0, 180)");
  if (spec.width <= 0 || spec.image_height <= 0) fail("image size must be positive");
  if (!std::isfinite(spec.height) || !std::isfinite(spec.target_height)) fail("heights must be finite");
}

std::vector<double> rig_azimuths_deg(int count) {
  std::vector<double> az;
  for (int k = 0; k < count; ++k) az.push_back(-90.0 + 180.0 * (k + 0.5) / count);
  std::stable_sort(az.begin(), az.end(), [](double a, double b) {
    const double da = std::abs(a), db = std::abs(b);
    if (std::abs(da - db) > 1e-9) return da < db;
    return a < b;
  });
  return az;
}

Eigen::Vector3d camera_position_scene(const CameraRigSpec& spec, int k) {
  const auto az = rig_azimuths_deg(spec.count);
  const double t = spec.count > 1 ? static_cast<double>(k) / (spec.count - 1) : 0.0;
  const double r = spec.radius_min + (spec.radius_max - spec.radius_min) * t;
  const double a = az.at(k) * std::numbers::pi / 180.0;
  return {r * std::sin(a), -r * std::cos(a), spec.height};
}

Eigen::Isometry3d scene_to_world(const CameraRigSpec& spec) {
  const Eigen::Vector3d c0 = camera_position_scene(spec, 0);
  const Eigen::Vector3d ground(c0.x(), c0.y(), 0.0);
  const Eigen::Vector3d y_axis = Eigen::Vector3d(-c0.x(), -c0.y(), 0.0).normalized();
  const Eigen::Vector3d z_axis = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d x_axis = y_axis.cross(z_axis);
  Eigen::Matrix3d r;
  r.row(0) = x_axis.transpose();
  r.row(1) = y_axis.transpose();
  r.row(2) = z_axis.transpose();
  Eigen::Isometry3d iso = Eigen::Isometry3d::Identity();
  iso.linear() = r;
  iso.translation() = -r * ground;
  return iso;
}

std::vector<CameraParams> build_rig(const CameraRigSpec& spec) {
  validate(spec);
  const Eigen::Isometry3d to_world = scene_to_world(spec);
  const Eigen::Vector3d target = to_world * Eigen::Vector3d(0.0, 0.0, spec.target_height);
  const double focal = 0.5 * spec.width / std::tan(0.5 * spec.fov_deg * std::numbers::pi / 180.0);

  std::vector<CameraParams> cams;
  for (int k = 0; k < spec.count; ++k) {
    const Eigen::Vector3d c = to_world * camera_position_scene(spec, k);
    const Eigen::Vector3d forward = (target - c).normalized();
    const Eigen::Vector3d right = forward.cross(Eigen::Vector3d::UnitZ()).normalized();
    const Eigen::Vector3d down = forward.cross(right);
    CameraParams cam;
    cam.id = k;
    cam.rotation.row(0) = right.transpose();
    cam.rotation.row(1) = down.transpose();
    cam.rotation.row(2) = forward.transpose();
    cam.translation = -cam.rotation * c;
    cam.intrinsics << focal, 0.0, 0.5 * spec.width, 0.0, focal, 0.5 * spec.image_height, 0.0, 0.0, 1.0;
    cam.width = spec.width;
    cam.height = spec.image_height;
    cams.push_back(cam);
  }
  return cams;
}

}  // namespace siteguard
