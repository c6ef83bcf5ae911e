#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "siteguard/camera.hpp"
#include "siteguard/detection.hpp"
#include "siteguard/rig.hpp"
#include "siteguard/scene.hpp"
#include "siteguard/skeleton.hpp"
#include "siteguard/tracking.hpp"

namespace testing {

using namespace siteguard;

inline CameraParams look_at(int id, const Eigen::Vector3d& center, const Eigen::Vector3d& target,
                            double focal = 1000.0, int width = 1920, int height = 1080) {
  const Eigen::Vector3d f = (target - center).normalized();
  const Eigen::Vector3d r = f.cross(Eigen::Vector3d::UnitZ()).normalized();
  const Eigen::Vector3d d = f.cross(r);
  CameraParams c;
  c.id = id;
  c.rotation.row(0) = r.transpose();
  c.rotation.row(1) = d.transpose();
  c.rotation.row(2) = f.transpose();
  c.translation = -c.rotation * center;
  c.intrinsics << focal, 0, width / 2.0, 0, focal, height / 2.0, 0, 0, 1;
  c.width = width;
  c.height = height;
  return c;
}

inline std::vector<CameraParams> default_rig(int count = 4) {
  CameraRigSpec spec;
  spec.count = count;
  return build_rig(spec);
}

// World point near the middle of the default rig's field of view.
inline Eigen::Vector3d scene_point(const CameraRigSpec& spec, double x, double y, double z) {
  return scene_to_world(spec) * Eigen::Vector3d(x, y, z);
}

// Pinhole projection written out by hand, independent of the library.
inline Eigen::Vector2d pinhole(const CameraParams& c, const Eigen::Vector3d& x) {
  const Eigen::Vector3d xc = c.rotation * x + c.translation;
  const double fx = c.intrinsics(0, 0), fy = c.intrinsics(1, 1), s = c.intrinsics(0, 1);
  const double cx = c.intrinsics(0, 2), cy = c.intrinsics(1, 2);
  const double a = xc.x() / xc.z(), b = xc.y() / xc.z();
  return {fx * a + s * b + cx, fy * b + cy};
}

// Distance of p to the line l = (a, b, c): |a u + b v + c| / sqrt(a^2 + b^2).
inline double line_distance(const Eigen::Vector3d& l, const Eigen::Vector2d& p) {
  return std::abs(l.x() * p.x() + l.y() * p.y() + l.z()) / std::hypot(l.x(), l.y());
}

// Symmetric point-to-epipolar-line distance from an explicit F_ij (p_j^T F p_i = 0).
inline double symmetric_line_distance(const Eigen::Matrix3d& f_ij, const Eigen::Vector2d& p_i,
                                      const Eigen::Vector2d& p_j) {
  const Eigen::Vector3d hi(p_i.x(), p_i.y(), 1.0), hj(p_j.x(), p_j.y(), 1.0);
  return line_distance(f_ij * hi, p_j) + line_distance(f_ij.transpose() * hj, p_i);
}

// Fundamental matrix from projection matrices: F = [e']_x P' P^+.
inline Eigen::Matrix3d fundamental_from_projections(const CameraParams& a, const CameraParams& b) {
  Eigen::Matrix<double, 3, 4> pa, pb;
  pa << a.intrinsics * a.rotation, a.intrinsics * a.translation;
  pb << b.intrinsics * b.rotation, b.intrinsics * b.translation;
  const Eigen::Vector3d ca = -a.rotation.transpose() * a.translation;
  const Eigen::Vector3d e = pb * ca.homogeneous();
  Eigen::Matrix3d ex;
  ex << 0, -e.z(), e.y(), e.z(), 0, -e.x(), -e.y(), e.x(), 0;
  const Eigen::Matrix<double, 4, 3> pinv = pa.transpose() * (pa * pa.transpose()).inverse();
  return ex * pb * pinv;
}

inline double matrix_cosine(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  return (a.array() * b.array()).sum() / (a.norm() * b.norm());
}

// Independent DLT: stacked u*p3 - p1, v*p3 - p2 rows solved with BDCSVD.
inline Eigen::Vector3d oracle_dlt(const std::vector<CameraParams>& cams, const std::vector<Eigen::Vector2d>& pts) {
  Eigen::MatrixXd a(2 * cams.size(), 4);
  for (std::size_t i = 0; i < cams.size(); ++i) {
    Eigen::Matrix<double, 3, 4> p;
    p << cams[i].intrinsics * cams[i].rotation, cams[i].intrinsics * cams[i].translation;
    a.row(2 * i) = pts[i].x() * p.row(2) - p.row(0);
    a.row(2 * i + 1) = pts[i].y() * p.row(2) - p.row(1);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::Vector4d x = svd.matrixV().col(3);
  return x.head<3>() / x.w();
}

// Exhaustive minimum over injective row->column maps (rows <= cols) or the
// transpose. Forbidden entries are avoided first, then the finite sum is
// minimized. Returns {forbidden count, finite sum}.
inline std::pair<int, double> brute_force_assignment(const Eigen::MatrixXd& c) {
  const bool flip = c.rows() > c.cols();
  const Eigen::MatrixXd m = flip ? Eigen::MatrixXd(c.transpose()) : c;
  const int k = static_cast<int>(m.rows()), n = static_cast<int>(m.cols());
  std::vector<int> cols(n);
  std::iota(cols.begin(), cols.end(), 0);
  std::pair<int, double> best{std::numeric_limits<int>::max(), 0.0};
  // Permutations of all columns; the first k entries give the map.
  do {
    int forbidden = 0;
    double sum = 0.0;
    for (int r = 0; r < k; ++r) {
      const double v = m(r, cols[r]);
      if (std::isinf(v)) ++forbidden;
      else sum += v;
    }
    if (forbidden < best.first || (forbidden == best.first && sum < best.second)) best = {forbidden, sum};
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

inline Pose3D standing_worker(const Eigen::Vector3d& base, double height = 1.8) {
  Pose3D p = canonical_skeleton(height);
  for (auto& j : p.joints) j.position += base;
  return p;
}

// Exact detection of a 3D pose in one camera (every joint in front assumed).
inline Detection2D detect_worker(const CameraParams& cam, const Pose3D& pose) {
  Detection2D d;
  d.camera_id = cam.id;
  d.entity_class = kWorkerClass;
  for (const auto& j : pose.joints) d.keypoints.push_back(j.present ? project(cam, j.position) : Point2D::absent());
  return d;
}

inline Detection2D detect_object(const CameraParams& cam, const std::string& cls, const Eigen::Vector3d& x) {
  Detection2D d;
  d.camera_id = cam.id;
  d.entity_class = cls;
  d.keypoints.push_back(project(cam, x));
  return d;
}

inline Track worker_track(int id, const Pose3D& pose, int frame, std::optional<double> height = 1.8) {
  Track t;
  t.track_id = id;
  t.entity_class = kWorkerClass;
  t.history.push_back({frame, pose});
  t.last_seen = frame;
  t.worker_height = height;
  return t;
}

inline Track object_track(int id, const std::string& cls, const Eigen::Vector3d& x, int frame) {
  Track t;
  t.track_id = id;
  t.entity_class = cls;
  t.history.push_back({frame, ObjectPoint3D{cls, x}});
  t.last_seen = frame;
  return t;
}

inline Eigen::Vector3d neck_of(const Pose3D& p) {
  return 0.5 * (p.at(Joint::shoulder_l) + p.at(Joint::shoulder_r));
}

}  // namespace testing
