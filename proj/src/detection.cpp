#include "siteguard/detection.hpp"

#include <cmath>
#include <sstream>

#include "siteguard/errors.hpp"

namespace siteguard {

namespace {

// Serialized values carry 9 significant digits, so a bbox center recomputed
// from the file can differ from the stored keypoint by a few ulps of that
// precision.
double center_tolerance(double a, double b) { return 1e-6 + 2e-8 * (std::abs(a) + std::abs(b)); }

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

void validate(const Detection2D& det) {
  const std::size_t expected = det.is_worker() ? kNumJoints : 1;
  if (det.keypoints.size() != expected)
    throw Error(ErrorCode::MalformedRecord, "'" + det.entity_class + "' detection needs " + std::to_string(expected) +
                                                " keypoints, got " + std::to_string(det.keypoints.size()));
  if (det.entity_class.empty()) throw Error(ErrorCode::MalformedRecord, "empty class");
  if (!(det.detection_confidence >= 0.0 && det.detection_confidence <= 1.0))
    throw Error(ErrorCode::MalformedRecord, "detection confidence outside [0,1]");
  for (const auto& p : det.keypoints) {
    if (!p.present && p.confidence != 0.0) throw Error(ErrorCode::MalformedRecord, "absent keypoint with confidence");
    if (p.present && !(std::isfinite(p.u) && std::isfinite(p.v)))
      throw Error(ErrorCode::MalformedRecord, "non-finite keypoint");
  }
  if (det.bbox && !det.is_worker() && det.keypoints[0].present) {
    const BBox& b = *det.bbox;
    if (std::abs(b.center_u() - det.keypoints[0].u) > center_tolerance(b.u_min, b.u_max) ||
        std::abs(b.center_v() - det.keypoints[0].v) > center_tolerance(b.v_min, b.v_max))
      throw Error(ErrorCode::MalformedRecord, "object keypoint differs from bbox center");
  }
}

OrderedJson to_json(const DetectionRecord& rec) {
  const Detection2D& d = rec.detection;
  OrderedJson j;
  j["frame"] = rec.frame;
  j["camera"] = d.camera_id;
  j["class"] = d.entity_class;
  j["conf"] = round_sig9(d.detection_confidence);
  OrderedJson kps = OrderedJson::array();
  for (const auto& p : d.keypoints) {
    if (p.present)
      kps.push_back({round_sig9(p.u), round_sig9(p.v), round_sig9(p.confidence)});
    else
      kps.push_back({0.0, 0.0, 0.0});
  }
  j["keypoints"] = kps;
  if (d.bbox)
    j["bbox"] = {round_sig9(d.bbox->u_min), round_sig9(d.bbox->v_min), round_sig9(d.bbox->u_max),
                 round_sig9(d.bbox->v_max)};
  return j;
}

DetectionRecord detection_from_json(const Json& j, std::size_t line) {
  if (!j.is_object()) malformed(line, "record is not an object");
  DetectionRecord rec;
  Detection2D& d = rec.detection;
  try {
    rec.frame = j.at("frame").get<int>();
    d.camera_id = j.at("camera").get<int>();
    d.entity_class = j.at("class").get<std::string>();
    d.detection_confidence = j.at("conf").get<double>();
    const Json& kps = j.at("keypoints");
    if (!kps.is_array()) malformed(line, "keypoints must be an array");
    for (const Json& k : kps) {
      if (k.is_null()) {
        d.keypoints.push_back(Point2D::absent());
        continue;
      }
      if (!k.is_array() || k.size() != 3) malformed(line, "keypoint must be [u, v, conf]");
      const double conf = k[2].get<double>();
      if (!(conf >= 0.0 && conf <= 1.0)) malformed(line, "keypoint confidence outside [0,1]");
      if (conf == 0.0)
        d.keypoints.push_back(Point2D::absent());
      else
        d.keypoints.push_back({k[0].get<double>(), k[1].get<double>(), conf, true});
    }
    if (j.contains("bbox") && !j.at("bbox").is_null()) {
      const Json& b = j.at("bbox");
      if (!b.is_array() || b.size() != 4) malformed(line, "bbox must be [u0, v0, u1, v1]");
      d.bbox = BBox{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
    }
  } catch (const Json::exception& e) {
    malformed(line, e.what());
  }
  try {
    validate(d);
  } catch (const Error& e) {
    malformed(line, e.what());
  }
  return rec;
}

std::vector<DetectionRecord> parse_detections(const std::string& text) {
  std::vector<DetectionRecord> out;
  for (const auto& [line, value] : parse_json_lines(text)) {
    DetectionRecord rec = detection_from_json(value, line);
    if (!out.empty() && rec.frame < out.back().frame)
      throw Error(ErrorCode::NonMonotonicFrame, "line " + std::to_string(line) + ": frame " +
                                                    std::to_string(rec.frame) + " after " +
                                                    std::to_string(out.back().frame));
    out.push_back(std::move(rec));
  }
  return out;
}

std::string serialize_detections(const std::vector<DetectionRecord>& records) {
  std::ostringstream out;
  for (const auto& r : records) out << to_json(r).dump() << '\n';
  return out.str();
}

}  // namespace siteguard
