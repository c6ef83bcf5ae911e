#include "siteguard/triangulation.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "siteguard/detection.hpp"
#include "siteguard/errors.hpp"

namespace siteguard {

namespace {

Eigen::Vector3d ray_direction(const CameraParams& cam, const Point2D& p) {
  const Eigen::Vector3d d = cam.rotation.transpose() * (cam.intrinsics.inverse() * p.homogeneous());
  return d.normalized();
}

const CameraParams& camera_by_id(const std::vector<CameraParams>& cameras, int id) {
  for (const auto& c : cameras)
    if (c.id == id) return c;
  throw Error(ErrorCode::BadCalibration, "no calibration for camera " + std::to_string(id));
}

}  // namespace

Eigen::Vector3d triangulate_point(const std::vector<Observation>& observations) {
  const std::size_t n = observations.size();
  if (n < 2) throw Error(ErrorCode::InsufficientViews, std::to_string(n) + " observation(s)");

  double max_sin = 0.0;
  std::vector<Eigen::Vector3d> rays;
  rays.reserve(n);
  for (const auto& o : observations) rays.push_back(ray_direction(*o.camera, o.point));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) max_sin = std::max(max_sin, rays[a].cross(rays[b]).norm());
  if (max_sin < 1e-9) throw Error(ErrorCode::DegenerateGeometry, "all viewing rays are parallel");

  Eigen::MatrixXd a(2 * n, 4);
  for (std::size_t k = 0; k < n; ++k) {
    const auto p = observations[k].camera->projection_matrix();
    const Point2D& pt = observations[k].point;
    a.row(2 * k) = pt.u * p.row(2) - p.row(0);
    a.row(2 * k + 1) = pt.v * p.row(2) - p.row(1);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::Vector4d s = svd.singularValues().head<4>();
  if (s(2) <= 0.0 || s(3) / s(2) > 0.99) throw Error(ErrorCode::DegenerateGeometry, "ambiguous DLT null space");
  const Eigen::Vector4d x = svd.matrixV().col(3);
  if (std::abs(x(3)) < 1e-12 * x.head<3>().norm())
    throw Error(ErrorCode::DegenerateGeometry, "triangulated point at infinity");
  return x.head<3>() / x(3);
}

Pose3D triangulate_worker(const CrossViewSelection& selection, const std::vector<CameraParams>& cameras) {
  if (selection.members.size() < 2)
    throw Error(ErrorCode::InsufficientViews, "selection has " + std::to_string(selection.members.size()) + " view(s)");
  Pose3D pose;
  std::vector<Observation> obs;
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    obs.clear();
    for (const auto& [cam_id, det] : selection.members) {
      if (j < det.keypoints.size() && det.keypoints[j].present)
        obs.push_back({&camera_by_id(cameras, cam_id), det.keypoints[j]});
    }
    if (obs.size() < 2) continue;
    try {
      pose.joints[j] = {triangulate_point(obs), true};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateGeometry) throw;
    }
  }
  if (pose.present_count() == 0) throw Error(ErrorCode::InsufficientViews, "no joint observed in two views");
  return pose;
}

ObjectPoint3D triangulate_object(const CrossViewSelection& selection, const std::vector<CameraParams>& cameras) {
  std::vector<Observation> obs;
  for (const auto& [cam_id, det] : selection.members) {
    if (!det.keypoints.empty() && det.keypoints[0].present)
      obs.push_back({&camera_by_id(cameras, cam_id), det.keypoints[0]});
  }
  return {selection.entity_class, triangulate_point(obs)};
}

}  // namespace siteguard
