#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "siteguard/rules.hpp"
#include "siteguard/tracking.hpp"

namespace siteguard {

inline constexpr double kNominalHeight = 1.75;

struct SemanticJoints {
  std::optional<Eigen::Vector3d> neck;   // shoulder midpoint
  std::optional<Eigen::Vector3d> torso;  // mean of shoulders and hips
  std::optional<Eigen::Vector3d> feet;   // mean of present ankles

  const std::optional<Eigen::Vector3d>& anchor(Anchor a) const;
};

SemanticJoints derive_semantic_joints(const Pose3D& pose);

double resolve_threshold(const ViolationRule& rule, std::optional<double> worker_height, double nominal_height);

struct ViolationEvent {
  int frame = 0;
  std::string rule_id;
  bool violated = false;
  std::vector<int> worker_track_ids;
  std::optional<int> object_track_id;
  bool latched = false;
  // False when this frame could not decide the outcome (anchor unavailable,
  // entity not observed). Such events are resolved by latching.
  bool evidence = true;

  // Entity the latch is keyed on: the worker for attachment rules, the
  // subject object otherwise.
  int key_entity() const;
};

// Geometry the rule predicates consume. The 3D pipeline derives these from
// tracks; the single-view baseline from pixel-space detections (z = 0).
struct WorkerObservation {
  int id = 0;
  SemanticJoints anchors;
  std::optional<Eigen::Vector3d> centroid;
  std::optional<double> height;
  bool fresh = true;  // observed in the evaluated frame
};

struct ObjectObservation {
  int id = 0;
  std::string object_class;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  bool fresh = true;
};

std::vector<WorkerObservation> worker_observations(std::span<const Track> workers, int frame);
std::vector<ObjectObservation> object_observations(std::span<const Track> objects, int frame);

std::vector<ViolationEvent> evaluate_attachment(const ViolationRule& rule, std::span<const WorkerObservation> workers,
                                                std::span<const ObjectObservation> objects, int frame,
                                                double nominal_height = kNominalHeight);
std::vector<ViolationEvent> evaluate_multi_worker(const ViolationRule& rule,
                                                  std::span<const WorkerObservation> workers,
                                                  std::span<const ObjectObservation> objects, int frame,
                                                  double nominal_height = kNominalHeight);
std::vector<ViolationEvent> evaluate_exclusive_occupancy(const ViolationRule& rule,
                                                         std::span<const WorkerObservation> workers,
                                                         std::span<const ObjectObservation> objects, int frame,
                                                         double nominal_height = kNominalHeight);
std::vector<ViolationEvent> evaluate_rule(const ViolationRule& rule, std::span<const WorkerObservation> workers,
                                          std::span<const ObjectObservation> objects, int frame,
                                          double nominal_height = kNominalHeight);

// Track-level entry points.
std::vector<ViolationEvent> evaluate_rule(const ViolationRule& rule, std::span<const Track> worker_tracks,
                                          std::span<const Track> object_tracks, int frame,
                                          double nominal_height = kNominalHeight);

// Events without evidence inherit a previous violation for the same
// (rule, key entity) as latched; otherwise they are not violated.
std::vector<ViolationEvent> latch_violations(const std::vector<ViolationEvent>& prev,
                                             const std::vector<ViolationEvent>& curr, int frame);

// Per-frame rule evaluation with carried latch state.
class ComplianceEngine {
 public:
  ComplianceEngine(std::vector<ViolationRule> rules, double nominal_height = kNominalHeight);

  std::vector<ViolationEvent> step(std::span<const Track> worker_tracks, std::span<const Track> object_tracks,
                                   int frame);
  const std::vector<ViolationRule>& rules() const { return rules_; }

 private:
  std::vector<ViolationRule> rules_;
  double nominal_height_;
  std::vector<ViolationEvent> previous_;
};

}  // namespace siteguard
