#include "siteguard/baseline.hpp"

#include "siteguard/errors.hpp"

namespace siteguard {

std::optional<double> pixel_height(const Detection2D& det) {
  if (det.is_worker() && det.keypoints.size() == kNumJoints) {
    const auto& nose = det.keypoints[idx(Joint::nose)];
    double ankle_v = 0.0;
    int n = 0;
    for (Joint a : {Joint::ankle_l, Joint::ankle_r}) {
      if (!det.keypoints[idx(a)].present) continue;
      ankle_v += det.keypoints[idx(a)].v;
      ++n;
    }
    if (nose.present && n > 0) {
      const double h = ankle_v / n - nose.v;
      if (h > 0.0) return h;
    }
  }
  if (det.bbox && det.bbox->height() > 0.0) return det.bbox->height();
  return std::nullopt;
}

namespace {

Pose3D pixel_pose(const Detection2D& det) {
  Pose3D p;
  for (std::size_t j = 0; j < kNumJoints && j < det.keypoints.size(); ++j)
    if (det.keypoints[j].present) p.joints[j] = {{det.keypoints[j].u, det.keypoints[j].v, 0.0}, true};
  return p;
}

// Metric thresholds have no pixel meaning; they become fractions of the
// nominal height.
ViolationRule pixel_rule(const ViolationRule& rule, double nominal_height) {
  ViolationRule r = rule;
  if (r.tau.kind == Threshold::Kind::meters) r.tau = Threshold::fraction(r.tau.value / nominal_height);
  return r;
}

std::vector<ViolationEvent> evaluate_view(const PipelineConfig& cfg, int frame, const std::vector<Detection2D>& dets) {
  std::vector<WorkerObservation> workers;
  std::vector<ObjectObservation> objects;
  int next_id = 0;
  for (const auto& d : dets) {
    if (!d.is_worker()) continue;
    const Pose3D pose = pixel_pose(d);
    WorkerObservation w;
    w.id = next_id++;
    w.anchors = derive_semantic_joints(pose);
    w.centroid = pose.centroid();
    w.height = pixel_height(d);
    // Without a pixel height the threshold has no meaningful scale.
    w.fresh = w.height.has_value();
    workers.push_back(std::move(w));
  }
  for (const auto& d : dets) {
    if (d.is_worker() || d.keypoints.empty() || !d.keypoints[0].present) continue;
    objects.push_back({next_id++, d.entity_class, {d.keypoints[0].u, d.keypoints[0].v, 0.0}, true});
  }
  std::vector<ViolationEvent> events;
  for (const auto& rule : cfg.rules) {
    // The nominal height only matters for workers lacking a pixel height,
    // which are already excluded from evidence.
    auto evs = evaluate_rule(pixel_rule(rule, cfg.nominal_height_m), std::span<const WorkerObservation>(workers),
                             std::span<const ObjectObservation>(objects), frame, cfg.nominal_height_m);
    for (auto& e : evs) {
      if (!e.evidence) e.violated = false;
      e.latched = false;
      events.push_back(std::move(e));
    }
  }
  return events;
}

}  // namespace

std::vector<ViolationEvent> run_baseline_single_view(const PipelineConfig& cfg,
                                                     const std::vector<DetectionRecord>& records) {
  validate(cfg);
  if (records.empty()) return {};
  const int camera = records.front().detection.camera_id;
  for (const auto& r : records) {
    if (r.detection.camera_id != camera)
      throw Error(ErrorCode::InvalidConfig, "single-view baseline got detections from cameras " +
                                                std::to_string(camera) + " and " +
                                                std::to_string(r.detection.camera_id));
  }
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].frame < records[i - 1].frame)
      throw Error(ErrorCode::NonMonotonicFrame, "frame " + std::to_string(records[i].frame) + " follows " +
                                                    std::to_string(records[i - 1].frame));

  std::vector<ViolationEvent> out;
  std::size_t i = 0;
  std::vector<Detection2D> dets;
  for (int f = records.front().frame; f <= records.back().frame; ++f) {
    dets.clear();
    for (; i < records.size() && records[i].frame == f; ++i) {
      validate(records[i].detection);
      dets.push_back(records[i].detection);
    }
    auto evs = evaluate_view(cfg, f, filter_detections(dets, cfg.association.phi));
    out.insert(out.end(), evs.begin(), evs.end());
  }
  return out;
}

}  // namespace siteguard
