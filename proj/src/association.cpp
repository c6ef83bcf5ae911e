#include "siteguard/association.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "siteguard/assignment.hpp"
#include "siteguard/errors.hpp"
#include "siteguard/kernels.hpp"

namespace siteguard {

void validate(const AssociationConfig& cfg) {
  if (!(cfg.phi >= 0.0 && cfg.phi <= 1.0)) throw Error(ErrorCode::InvalidConfig, "phi must lie in [0,1]");
  if (!(cfg.theta > 0.0)) throw Error(ErrorCode::InvalidConfig, "theta must be positive");
}

std::vector<Detection2D> filter_detections(const std::vector<Detection2D>& dets, double phi) {
  std::vector<Detection2D> kept;
  for (const auto& d : dets) {
    if (!(d.detection_confidence >= phi)) continue;
    Detection2D out = d;
    if (out.is_worker()) {
      for (auto& p : out.keypoints)
        if (p.present && p.confidence < phi) p = Point2D::absent();
    }
    kept.push_back(std::move(out));
  }
  return kept;
}

ViewIndex::ViewIndex(const std::vector<int>& camera_ids) : ids_(camera_ids) {}

std::size_t ViewIndex::of(int camera_id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i)
    if (ids_[i] == camera_id) return i;
  throw Error(ErrorCode::MalformedRecord, "detection from unknown camera " + std::to_string(camera_id));
}

double selection_cost_worker(const Detection2D& det, const CrossViewSelection& sel, const FundamentalSet& fmats,
                             const ViewIndex& views, const AssociationConfig& cfg) {
  const std::size_t a = views.of(det.camera_id);
  double member_sum = 0.0;
  std::size_t members_used = 0;
  for (const auto& [cam, member] : sel.members) {
    const FundamentalPair& pair = fmats.pair(a, views.of(cam));
    double joint_sum = 0.0;
    std::size_t shared = 0;
    const std::size_t n = std::min(det.keypoints.size(), member.keypoints.size());
    for (std::size_t j = 0; j < n; ++j) {
      if (!det.keypoints[j].present || !member.keypoints[j].present) continue;
      joint_sum += epipolar_distance(det.keypoints[j], member.keypoints[j], pair, cfg.distance_mode);
      ++shared;
    }
    if (shared == 0) continue;
    member_sum += joint_sum / static_cast<double>(shared);
    ++members_used;
  }
  if (members_used == 0) return kInfiniteCost;
  return member_sum / static_cast<double>(members_used);
}

double selection_cost_object(const Detection2D& det, const CrossViewSelection& sel, const FundamentalSet& fmats,
                             const ViewIndex& views, const AssociationConfig& cfg) {
  if (det.entity_class != sel.entity_class) return kInfiniteCost;
  if (det.keypoints.empty() || !det.keypoints[0].present) return kInfiniteCost;
  const std::size_t a = views.of(det.camera_id);
  double sum = 0.0;
  std::size_t used = 0;
  for (const auto& [cam, member] : sel.members) {
    if (member.keypoints.empty() || !member.keypoints[0].present) continue;
    sum += epipolar_distance(det.keypoints[0], member.keypoints[0], fmats.pair(a, views.of(cam)), cfg.distance_mode);
    ++used;
  }
  if (used == 0) return kInfiniteCost;
  return sum / static_cast<double>(used);
}

double selection_cost(const Detection2D& det, const CrossViewSelection& sel, const FundamentalSet& fmats,
                      const ViewIndex& views, const AssociationConfig& cfg) {
  if (det.is_worker() != (sel.entity_class == kWorkerClass)) return kInfiniteCost;
  if (det.is_worker()) return selection_cost_worker(det, sel, fmats, views, cfg);
  return selection_cost_object(det, sel, fmats, views, cfg);
}

namespace {

CrossViewSelection seed_selection(int id, const Detection2D& det) {
  CrossViewSelection s;
  s.selection_id = id;
  s.entity_class = det.entity_class;
  s.members.emplace(det.camera_id, det);
  return s;
}

// Matches one view's detections of a single class against the current
// selections of that class; unmatched detections open new selections.
void merge_view(const std::vector<const Detection2D*>& dets, std::vector<CrossViewSelection>& selections,
                const std::vector<std::size_t>& candidate_idx, int& next_id, const FundamentalSet& fmats,
                const ViewIndex& views, const AssociationConfig& cfg, Execution exec) {
  if (dets.empty()) return;
  std::vector<const CrossViewSelection*> sels;
  sels.reserve(candidate_idx.size());
  for (std::size_t i : candidate_idx) sels.push_back(&selections[i]);

  const Eigen::MatrixXd cost = exec == Execution::parallel
                                   ? kernels::cost_matrix_omp(dets, sels, fmats, views, cfg)
                                   : kernels::cost_matrix_serial(dets, sels, fmats, views, cfg);
  std::vector<int> match(dets.size(), -1);
  for (const auto& [k, m] : solve_assignment(cost))
    if (cost(k, m) < cfg.theta) match[k] = m;

  for (std::size_t k = 0; k < dets.size(); ++k) {
    if (match[k] >= 0) {
      selections[candidate_idx[match[k]]].members.emplace(dets[k]->camera_id, *dets[k]);
    } else {
      selections.push_back(seed_selection(next_id++, *dets[k]));
    }
  }
}

}  // namespace

FrameSelections associate_frame(const std::vector<std::vector<Detection2D>>& dets_per_view,
                                const FundamentalSet& fmats, const ViewIndex& views, const AssociationConfig& cfg,
                                Execution exec) {
  if (dets_per_view.size() != fmats.camera_count() || dets_per_view.size() != views.size())
    throw Error(ErrorCode::MismatchedCameraCount, std::to_string(dets_per_view.size()) + " views for " +
                                                      std::to_string(fmats.camera_count()) + " cameras");
  FrameSelections out;
  int next_worker = 0;
  int next_object = 0;
  for (std::size_t v = 0; v < dets_per_view.size(); ++v) {
    for (const auto& d : dets_per_view[v])
      if (views.of(d.camera_id) != v)
        throw Error(ErrorCode::MismatchedCameraCount, "detection of camera " + std::to_string(d.camera_id) +
                                                          " listed under view " + std::to_string(v));
  }
  if (dets_per_view.empty()) return out;

  for (const auto& d : dets_per_view[0]) {
    if (d.is_worker())
      out.workers.push_back(seed_selection(next_worker++, d));
    else
      out.objects.push_back(seed_selection(next_object++, d));
  }

  for (std::size_t v = 1; v < dets_per_view.size(); ++v) {
    std::vector<const Detection2D*> workers;
    std::map<std::string, std::vector<const Detection2D*>> objects_by_class;
    for (const auto& d : dets_per_view[v]) {
      if (d.is_worker())
        workers.push_back(&d);
      else
        objects_by_class[d.entity_class].push_back(&d);
    }

    std::vector<std::size_t> all_workers(out.workers.size());
    for (std::size_t i = 0; i < all_workers.size(); ++i) all_workers[i] = i;
    merge_view(workers, out.workers, all_workers, next_worker, fmats, views, cfg, exec);

    for (const auto& [cls, dets] : objects_by_class) {
      std::vector<std::size_t> same_class;
      for (std::size_t i = 0; i < out.objects.size(); ++i)
        if (out.objects[i].entity_class == cls) same_class.push_back(i);
      merge_view(dets, out.objects, same_class, next_object, fmats, views, cfg, exec);
    }
  }
  return out;
}

}  // namespace siteguard
