#include "siteguard/kernels.hpp"

#include "siteguard/detail/exception_slot.hpp"
#include "siteguard/errors.hpp"
#include "siteguard/triangulation.hpp"

namespace siteguard::kernels {

namespace {

constexpr long kMinParallelCells = 64;

}  // namespace

Eigen::MatrixXd cost_matrix_serial(const std::vector<const Detection2D*>& dets,
                                   const std::vector<const CrossViewSelection*>& sels, const FundamentalSet& fmats,
                                   const ViewIndex& views, const AssociationConfig& cfg) {
  const long rows = static_cast<long>(dets.size());
  const long cols = static_cast<long>(sels.size());
  Eigen::MatrixXd cost(rows, cols);
  for (long k = 0; k < rows; ++k)
    for (long m = 0; m < cols; ++m) cost(k, m) = selection_cost(*dets[k], *sels[m], fmats, views, cfg);
  return cost;
}

Eigen::MatrixXd cost_matrix_omp(const std::vector<const Detection2D*>& dets,
                                const std::vector<const CrossViewSelection*>& sels, const FundamentalSet& fmats,
                                const ViewIndex& views, const AssociationConfig& cfg) {
  const long rows = static_cast<long>(dets.size());
  const long cols = static_cast<long>(sels.size());
  Eigen::MatrixXd cost(rows, cols);
  detail::ExceptionSlot slot;
#pragma omp parallel for collapse(2) schedule(static) if (rows * cols >= kMinParallelCells)
  for (long k = 0; k < rows; ++k)
    for (long m = 0; m < cols; ++m)
      slot.run([&] { cost(k, m) = selection_cost(*dets[k], *sels[m], fmats, views, cfg); });
  slot.rethrow();
  return cost;
}

namespace {

std::optional<Pose3D> try_triangulate(const CrossViewSelection& sel, const std::vector<CameraParams>& cameras) {
  if (sel.members.size() < 2) return std::nullopt;
  try {
    return triangulate_worker(sel, cameras);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InsufficientViews) return std::nullopt;
    throw;
  }
}

}  // namespace

std::vector<std::optional<Pose3D>> triangulate_workers_serial(const std::vector<CrossViewSelection>& sels,
                                                              const std::vector<CameraParams>& cameras) {
  std::vector<std::optional<Pose3D>> out(sels.size());
  for (std::size_t i = 0; i < sels.size(); ++i) out[i] = try_triangulate(sels[i], cameras);
  return out;
}

std::vector<std::optional<Pose3D>> triangulate_workers_omp(const std::vector<CrossViewSelection>& sels,
                                                           const std::vector<CameraParams>& cameras) {
  const long n = static_cast<long>(sels.size());
  std::vector<std::optional<Pose3D>> out(sels.size());
  detail::ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic) if (n >= 4)
  for (long i = 0; i < n; ++i) slot.run([&] { out[i] = try_triangulate(sels[i], cameras); });
  slot.rethrow();
  return out;
}

}  // namespace siteguard::kernels
