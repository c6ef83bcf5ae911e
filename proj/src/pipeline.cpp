#include "siteguard/pipeline.hpp"

#include <algorithm>
#include <set>

#include "siteguard/baseline.hpp"
#include "siteguard/errors.hpp"
#include "siteguard/kernels.hpp"
#include "siteguard/triangulation.hpp"

namespace siteguard {

void validate(const PipelineConfig& cfg) {
  validate(cfg.association);
  validate(cfg.tracking);
  for (const auto& r : cfg.rules) validate(r);
  if (!(cfg.nominal_height_m > 0.0)) throw Error(ErrorCode::InvalidConfig, "nominal_height_m must be positive");
  std::set<std::string> ids;
  for (const auto& r : cfg.rules)
    if (!ids.insert(r.rule_id).second) throw Error(ErrorCode::InvalidConfig, "duplicate rule id '" + r.rule_id + "'");
}

std::vector<CameraParams> select_cameras(const std::vector<CameraParams>& cams, const std::vector<int>& ids) {
  std::vector<CameraParams> out;
  for (const auto& c : cams)
    if (ids.empty() || std::find(ids.begin(), ids.end(), c.id) != ids.end()) out.push_back(c);
  for (int id : ids)
    if (std::none_of(cams.begin(), cams.end(), [&](const CameraParams& c) { return c.id == id; }))
      throw Error(ErrorCode::InvalidConfig, "camera " + std::to_string(id) + " is not in the calibration");
  std::sort(out.begin(), out.end(), [](const CameraParams& a, const CameraParams& b) { return a.id < b.id; });
  return out;
}

namespace {

std::vector<int> ids_of(const std::vector<CameraParams>& cams) {
  std::vector<int> ids;
  for (const auto& c : cams) ids.push_back(c.id);
  return ids;
}

}  // namespace

Pipeline::Pipeline(PipelineConfig cfg, std::vector<CameraParams> cameras)
    : cfg_(std::move(cfg)),
      calibrated_ids_(ids_of(cameras)),
      cameras_(select_cameras(cameras, cfg_.cameras)),
      fmats_(cameras_),
      views_(ids_of(cameras_)),
      compliance_(cfg_.rules, cfg_.nominal_height_m) {
  validate(cfg_);
  if (cameras_.size() < 2)
    throw Error(ErrorCode::InsufficientViews, "multi-view processing needs at least two cameras");
}

std::vector<ViolationEvent> Pipeline::process_frame(int frame, const std::vector<Detection2D>& detections) {
  if (result_.frame_range && frame <= result_.frame_range->second)
    throw Error(ErrorCode::NonMonotonicFrame, "frame " + std::to_string(frame) + " after " +
                                                  std::to_string(result_.frame_range->second));

  std::vector<std::vector<Detection2D>> per_view(views_.size());
  for (const auto& d : filter_detections(detections, cfg_.association.phi)) {
    validate(d);
    if (std::find(calibrated_ids_.begin(), calibrated_ids_.end(), d.camera_id) == calibrated_ids_.end())
      throw Error(ErrorCode::MalformedRecord, "detection from uncalibrated camera " + std::to_string(d.camera_id));
    const auto& ids = views_.ids();
    if (std::find(ids.begin(), ids.end(), d.camera_id) == ids.end()) continue;
    per_view[views_.of(d.camera_id)].push_back(d);
  }

  const FrameSelections sel = associate_frame(per_view, fmats_, views_, cfg_.association, cfg_.execution);

  std::vector<CrossViewSelection> multi;
  for (const auto& s : sel.workers)
    if (s.members.size() >= 2) multi.push_back(s);
  const auto triangulated = cfg_.execution == Execution::parallel
                                ? kernels::triangulate_workers_omp(multi, cameras_)
                                : kernels::triangulate_workers_serial(multi, cameras_);
  std::vector<Pose3D> poses;
  for (const auto& p : triangulated)
    if (p) poses.push_back(*p);

  std::vector<ObjectPoint3D> objects;
  for (const auto& s : sel.objects) {
    if (s.members.size() < 2) continue;
    try {
      objects.push_back(triangulate_object(s, cameras_));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientViews && e.code() != ErrorCode::DegenerateGeometry) throw;
    }
  }

  tracker_ = update_tracks(tracker_, poses, objects, frame, cfg_.tracking);

  std::vector<Track> workers, objs;
  for (const auto& t : tracker_.active) (t.is_worker() ? workers : objs).push_back(t);
  auto events = compliance_.step(workers, objs, frame);

  for (const auto& e : events) {
    if (!e.violated) continue;
    std::set<int> ids(e.worker_track_ids.begin(), e.worker_track_ids.end());
    ids.insert(e.key_entity());
    for (int id : ids) result_.entity_violations[{id, frame}].push_back(e.rule_id);
  }
  result_.events.insert(result_.events.end(), events.begin(), events.end());
  if (!result_.frame_range)
    result_.frame_range = {frame, frame};
  else
    result_.frame_range->second = frame;
  return events;
}

PipelineResult Pipeline::finish() && {
  result_.tracks = std::move(tracker_);
  return std::move(result_);
}

PipelineResult run_pipeline(const PipelineConfig& cfg, const std::vector<CameraParams>& cameras,
                            const std::vector<DetectionRecord>& records) {
  validate(cfg);
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].frame < records[i - 1].frame)
      throw Error(ErrorCode::NonMonotonicFrame, "frame " + std::to_string(records[i].frame) + " follows " +
                                                    std::to_string(records[i - 1].frame));

  const auto selected = select_cameras(cameras, cfg.cameras);
  if (selected.empty()) throw Error(ErrorCode::InsufficientViews, "no cameras selected");
  if (selected.size() == 1) {
    std::vector<DetectionRecord> own;
    for (const auto& r : records)
      if (r.detection.camera_id == selected.front().id) own.push_back(r);
    PipelineResult result;
    result.single_view_fallback = true;
    PipelineConfig single = cfg;
    single.cameras = {selected.front().id};
    result.events = run_baseline_single_view(single, own);
    if (!records.empty()) result.frame_range = {records.front().frame, records.back().frame};
    for (const auto& e : result.events)
      if (e.violated) result.entity_violations[{e.key_entity(), e.frame}].push_back(e.rule_id);
    return result;
  }

  Pipeline pipeline(cfg, cameras);
  if (records.empty()) return std::move(pipeline).finish();
  std::size_t i = 0;
  std::vector<Detection2D> frame_dets;
  for (int f = records.front().frame; f <= records.back().frame; ++f) {
    frame_dets.clear();
    for (; i < records.size() && records[i].frame == f; ++i) frame_dets.push_back(records[i].detection);
    pipeline.process_frame(f, frame_dets);
  }
  return std::move(pipeline).finish();
}

OrderedJson to_json(const ViolationEvent& ev) {
  std::vector<int> entities{ev.key_entity()};
  for (int w : ev.worker_track_ids)
    if (w != entities.front()) entities.push_back(w);
  OrderedJson j;
  j["frame"] = ev.frame;
  j["rule"] = ev.rule_id;
  j["entities"] = entities;
  j["violated"] = ev.violated;
  j["latched"] = ev.latched;
  return j;
}

std::string serialize_violations(const std::vector<ViolationEvent>& events) {
  std::string out;
  for (const auto& ev : events) {
    out += to_json(ev).dump();
    out += '\n';
  }
  return out;
}

namespace {

OrderedJson point_json(const Eigen::Vector3d& p) {
  return OrderedJson::array({round_sig9(p.x()), round_sig9(p.y()), round_sig9(p.z())});
}

OrderedJson track_json(const Track& t, bool retired, const PipelineResult& result) {
  OrderedJson j;
  j["track_id"] = t.track_id;
  j["class"] = t.entity_class;
  j["retired"] = retired;
  j["last_seen"] = t.last_seen;
  if (t.worker_height) j["height"] = round_sig9(*t.worker_height);
  OrderedJson history = OrderedJson::array();
  for (const auto& entry : t.history) {
    OrderedJson h;
    h["frame"] = entry.frame;
    if (const auto* pose = std::get_if<Pose3D>(&entry.state)) {
      OrderedJson joints = OrderedJson::array();
      for (const auto& jt : pose->joints) joints.push_back(jt.present ? point_json(jt.position) : OrderedJson());
      h["joints"] = joints;
    } else {
      h["position"] = point_json(std::get<ObjectPoint3D>(entry.state).position);
    }
    const auto it = result.entity_violations.find({t.track_id, entry.frame});
    h["violations"] = it == result.entity_violations.end() ? std::vector<std::string>{} : it->second;
    history.push_back(std::move(h));
  }
  j["history"] = history;
  return j;
}

}  // namespace

OrderedJson tracks_dump(const PipelineResult& result) {
  std::vector<std::pair<const Track*, bool>> all;
  for (const auto& t : result.tracks.active) all.push_back({&t, false});
  for (const auto& t : result.tracks.retired) all.push_back({&t, true});
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first->track_id < b.first->track_id; });
  OrderedJson root;
  root["frames"] = result.frame_range
                       ? OrderedJson::array({result.frame_range->first, result.frame_range->second})
                       : OrderedJson();
  root["single_view_fallback"] = result.single_view_fallback;
  OrderedJson tracks = OrderedJson::array();
  for (const auto& [t, retired] : all) tracks.push_back(track_json(*t, retired, result));
  root["tracks"] = tracks;
  return root;
}

}  // namespace siteguard
