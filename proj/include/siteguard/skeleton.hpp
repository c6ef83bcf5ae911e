#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace siteguard {

inline constexpr std::size_t kNumJoints = 17;

// COCO-17 keypoint order.
enum class Joint : std::size_t {
  nose = 0,
  eye_l = 1,
  eye_r = 2,
  ear_l = 3,
  ear_r = 4,
  shoulder_l = 5,
  shoulder_r = 6,
  elbow_l = 7,
  elbow_r = 8,
  wrist_l = 9,
  wrist_r = 10,
  hip_l = 11,
  hip_r = 12,
  knee_l = 13,
  knee_r = 14,
  ankle_l = 15,
  ankle_r = 16,
};

constexpr std::size_t idx(Joint j) { return static_cast<std::size_t>(j); }

inline constexpr std::array<std::pair<std::size_t, std::size_t>, 19> kCocoEdges{{
    {15, 13}, {13, 11}, {16, 14}, {14, 12}, {11, 12}, {5, 11}, {6, 12},
    {5, 6},   {5, 7},   {6, 8},   {7, 9},   {8, 10},  {1, 2},  {0, 1},
    {0, 2},   {1, 3},   {2, 4},   {3, 5},   {4, 6},
}};

inline const std::string kWorkerClass = "worker";

struct Point2D {
  double u = 0.0;
  double v = 0.0;
  double confidence = 0.0;
  bool present = false;

  Eigen::Vector3d homogeneous() const { return {u, v, 1.0}; }
  Eigen::Vector2d pixel() const { return {u, v}; }

  static Point2D at(double u, double v, double confidence = 1.0) { return {u, v, confidence, true}; }
  static Point2D absent() { return {}; }
};

struct Joint3D {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  bool present = false;
};

struct Pose3D {
  std::array<Joint3D, kNumJoints> joints{};

  std::size_t present_count() const;
  // Mean of present joints; nullopt when none are present.
  std::optional<Eigen::Vector3d> centroid() const;
  bool has(Joint j) const { return joints[idx(j)].present; }
  const Eigen::Vector3d& at(Joint j) const { return joints[idx(j)].position; }
};

struct ObjectPoint3D {
  std::string object_class;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

}  // namespace siteguard
