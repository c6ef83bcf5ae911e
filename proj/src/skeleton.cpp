#include "siteguard/skeleton.hpp"

namespace siteguard {

std::size_t Pose3D::present_count() const {
  std::size_t n = 0;
  for (const auto& j : joints) n += j.present ? 1 : 0;
  return n;
}

std::optional<Eigen::Vector3d> Pose3D::centroid() const {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  std::size_t n = 0;
  for (const auto& j : joints) {
    if (!j.present) continue;
    sum += j.position;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace siteguard
