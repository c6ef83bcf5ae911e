#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "siteguard/association.hpp"
#include "siteguard/camera.hpp"
#include "siteguard/detection.hpp"

namespace siteguard::kernels {

// Detections x selections cost matrix. The OpenMP variants must produce
// bit-identical results to the serial references.
Eigen::MatrixXd cost_matrix_serial(const std::vector<const Detection2D*>& dets,
                                   const std::vector<const CrossViewSelection*>& sels, const FundamentalSet& fmats,
                                   const ViewIndex& views, const AssociationConfig& cfg);
Eigen::MatrixXd cost_matrix_omp(const std::vector<const Detection2D*>& dets,
                                const std::vector<const CrossViewSelection*>& sels, const FundamentalSet& fmats,
                                const ViewIndex& views, const AssociationConfig& cfg);

// Triangulates every selection; nullopt where triangulation is impossible.
std::vector<std::optional<Pose3D>> triangulate_workers_serial(const std::vector<CrossViewSelection>& sels,
                                                              const std::vector<CameraParams>& cameras);
std::vector<std::optional<Pose3D>> triangulate_workers_omp(const std::vector<CrossViewSelection>& sels,
                                                           const std::vector<CameraParams>& cameras);

}  // namespace siteguard::kernels
