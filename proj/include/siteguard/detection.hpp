#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "siteguard/json_io.hpp"
#include "siteguard/skeleton.hpp"

namespace siteguard {

struct BBox {
  double u_min = 0.0, v_min = 0.0, u_max = 0.0, v_max = 0.0;
  double center_u() const { return 0.5 * (u_min + u_max); }
  double center_v() const { return 0.5 * (v_min + v_max); }
  double height() const { return v_max - v_min; }
};

struct Detection2D {
  int camera_id = 0;
  std::string entity_class = kWorkerClass;
  std::vector<Point2D> keypoints;  // 17 for workers, 1 (bbox center) for objects
  std::optional<BBox> bbox;
  double detection_confidence = 1.0;

  bool is_worker() const { return entity_class == kWorkerClass; }
};

// Throws MalformedRecord when keypoint count or bbox/center agreement is off.
void validate(const Detection2D& det);

struct CrossViewSelection {
  int selection_id = 0;
  std::string entity_class;
  std::map<int, Detection2D> members;  // camera_id -> detection
};

// One detections-file record.
struct DetectionRecord {
  int frame = 0;
  Detection2D detection;
};

OrderedJson to_json(const DetectionRecord& rec);
// `line` is reported in MalformedRecord messages.
DetectionRecord detection_from_json(const Json& j, std::size_t line);

// Parses a whole JSONL stream; frames must be non-decreasing.
std::vector<DetectionRecord> parse_detections(const std::string& text);
std::string serialize_detections(const std::vector<DetectionRecord>& records);

}  // namespace siteguard
