#pragma once

#include <map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "siteguard/camera.hpp"
#include "siteguard/skeleton.hpp"

namespace siteguard {

enum class DistanceMode { algebraic, geometric };

// Fundamental matrices for an ordered camera pair: p_j^T f_ij p_i = 0 and
// p_i^T f_ji p_j = 0. Both are Frobenius-normalized with the largest-magnitude
// entry positive.
struct FundamentalPair {
  Eigen::Matrix3d f_ij;
  Eigen::Matrix3d f_ji;

  // Normalizes arbitrary-scale inputs.
  static FundamentalPair from_matrices(const Eigen::Matrix3d& f_ij, const Eigen::Matrix3d& f_ji);
  FundamentalPair reversed() const { return {f_ji, f_ij}; }
};

Eigen::Matrix3d normalize_fundamental(const Eigen::Matrix3d& f);
Eigen::Matrix3d skew(const Eigen::Vector3d& t);

// Throws DegenerateBaseline when the camera centers coincide.
FundamentalPair compute_fundamental(const CameraParams& cam_i, const CameraParams& cam_j);

double epipolar_distance(const Point2D& p_i, const Point2D& p_j, const FundamentalPair& pair,
                         DistanceMode mode = DistanceMode::geometric);

// All ordered pairs of a rig, addressed by position in the camera list.
class FundamentalSet {
 public:
  FundamentalSet() = default;
  explicit FundamentalSet(const std::vector<CameraParams>& cams);

  std::size_t camera_count() const { return count_; }
  // Pair oriented from view a to view b (a != b).
  const FundamentalPair& pair(std::size_t a, std::size_t b) const;

 private:
  std::size_t count_ = 0;
  std::vector<FundamentalPair> pairs_;  // row-major count_ x count_, diagonal unused
};

}  // namespace siteguard
