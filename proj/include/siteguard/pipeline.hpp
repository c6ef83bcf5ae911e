#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "siteguard/association.hpp"
#include "siteguard/camera.hpp"
#include "siteguard/compliance.hpp"
#include "siteguard/detection.hpp"
#include "siteguard/json_io.hpp"
#include "siteguard/rules.hpp"
#include "siteguard/tracking.hpp"

namespace siteguard {

struct PipelineConfig {
  AssociationConfig association;
  TrackingConfig tracking;
  std::vector<ViolationRule> rules = default_rules();
  double nominal_height_m = kNominalHeight;
  // Restrict processing to these camera ids; empty keeps every camera.
  std::vector<int> cameras;
  Execution execution = Execution::parallel;
};

void validate(const PipelineConfig& cfg);

struct PipelineResult {
  std::vector<ViolationEvent> events;
  TrackerState tracks;
  std::optional<std::pair<int, int>> frame_range;
  // (track id, frame) -> rule ids violated by that entity at that frame.
  std::map<std::pair<int, int>, std::vector<std::string>> entity_violations;
  bool single_view_fallback = false;
};

// Multi-view processing with carried tracking and latch state. Frames must
// be fed in increasing order.
class Pipeline {
 public:
  Pipeline(PipelineConfig cfg, std::vector<CameraParams> cameras);

  // Returns the frame's final (latched) events.
  std::vector<ViolationEvent> process_frame(int frame, const std::vector<Detection2D>& detections);
  PipelineResult finish() &&;

  const std::vector<CameraParams>& cameras() const { return cameras_; }

 private:
  PipelineConfig cfg_;
  std::vector<int> calibrated_ids_;
  std::vector<CameraParams> cameras_;
  FundamentalSet fmats_;
  ViewIndex views_;
  TrackerState tracker_;
  ComplianceEngine compliance_;
  PipelineResult result_;
};

// Keeps only calibrations listed in `ids` (all when empty), in id order.
std::vector<CameraParams> select_cameras(const std::vector<CameraParams>& cams, const std::vector<int>& ids);

// Whole-stream driver. Frames between the first and last record are all
// processed, empty ones included. A single camera switches to the 2D
// single-view baseline.
PipelineResult run_pipeline(const PipelineConfig& cfg, const std::vector<CameraParams>& cameras,
                            const std::vector<DetectionRecord>& records);

OrderedJson to_json(const ViolationEvent& ev);
std::string serialize_violations(const std::vector<ViolationEvent>& events);
OrderedJson tracks_dump(const PipelineResult& result);

}  // namespace siteguard
