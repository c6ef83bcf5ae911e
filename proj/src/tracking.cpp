#include "siteguard/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Core>

#include "siteguard/assignment.hpp"
#include "siteguard/errors.hpp"

namespace siteguard {

void validate(const TrackingConfig& cfg) {
  if (!(cfg.psi > 0.0)) throw Error(ErrorCode::InvalidConfig, "psi must be positive");
  if (cfg.max_gap < 0) throw Error(ErrorCode::InvalidConfig, "max_gap must be >= 0");
}

double track_cost(const Pose3D& prev, const Pose3D& curr) {
  double sum = 0.0;
  std::size_t shared = 0;
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    if (!prev.joints[j].present || !curr.joints[j].present) continue;
    sum += (prev.joints[j].position - curr.joints[j].position).norm();
    ++shared;
  }
  if (shared > 0) return sum / static_cast<double>(shared);
  const auto a = prev.centroid();
  const auto b = curr.centroid();
  if (!a || !b) return kInfiniteCost;
  return (a->head<2>() - b->head<2>()).norm();
}

double track_cost(const ObjectPoint3D& prev, const ObjectPoint3D& curr) {
  return (prev.position - curr.position).norm();
}

std::optional<double> estimate_worker_height(const Pose3D& pose) {
  if (!pose.has(Joint::nose)) return std::nullopt;
  double ankle_z = 0.0;
  int n = 0;
  for (Joint a : {Joint::ankle_l, Joint::ankle_r}) {
    if (!pose.has(a)) continue;
    ankle_z += pose.at(a).z();
    ++n;
  }
  if (n == 0) return std::nullopt;
  return pose.at(Joint::nose).z() - ankle_z / n;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::logic_error("median of empty sequence");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

namespace {

void append_state(Track& t, int frame, EntityState state) {
  if (const auto* pose = std::get_if<Pose3D>(&state)) {
    if (const auto h = estimate_worker_height(*pose)) {
      t.height_samples.push_back(*h);
      t.worker_height = median(t.height_samples);
    }
  }
  t.history.push_back({frame, std::move(state)});
  t.last_seen = frame;
}

template <typename Entity>
void match_class(std::vector<Track>& active, const std::string& cls, const std::vector<const Entity*>& entities,
                 int frame, const TrackingConfig& cfg, int& next_id) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < active.size(); ++i)
    if (active[i].entity_class == cls) candidates.push_back(i);

  Eigen::MatrixXd cost(static_cast<long>(candidates.size()), static_cast<long>(entities.size()));
  for (std::size_t r = 0; r < candidates.size(); ++r) {
    const auto& prev = std::get<Entity>(active[candidates[r]].latest().state);
    for (std::size_t c = 0; c < entities.size(); ++c) cost(r, c) = track_cost(prev, *entities[c]);
  }
  std::vector<int> owner(entities.size(), -1);
  for (const auto& [r, c] : solve_assignment(cost))
    if (cost(r, c) < cfg.psi) owner[c] = static_cast<int>(candidates[r]);

  for (std::size_t c = 0; c < entities.size(); ++c) {
    if (owner[c] >= 0) {
      append_state(active[owner[c]], frame, *entities[c]);
      continue;
    }
    Track t;
    t.track_id = next_id++;
    t.entity_class = cls;
    append_state(t, frame, *entities[c]);
    active.push_back(std::move(t));
  }
}

}  // namespace

TrackerState update_tracks(const TrackerState& state, const std::vector<Pose3D>& poses,
                           const std::vector<ObjectPoint3D>& objects, int frame, const TrackingConfig& cfg) {
  if (state.last_frame && frame <= *state.last_frame)
    throw Error(ErrorCode::NonMonotonicFrame,
                "frame " + std::to_string(frame) + " after " + std::to_string(*state.last_frame));
  for (const auto& t : state.active)
    if (frame <= t.last_seen)
      throw Error(ErrorCode::NonMonotonicFrame, "track " + std::to_string(t.track_id) + " already saw frame " +
                                                    std::to_string(t.last_seen));

  TrackerState next;
  next.retired = state.retired;
  next.next_id = state.next_id;
  next.last_frame = frame;
  // Tracks that already missed more than max_gap frames cannot match.
  for (const auto& t : state.active) {
    if (frame - t.last_seen - 1 > cfg.max_gap)
      next.retired.push_back(t);
    else
      next.active.push_back(t);
  }

  std::vector<const Pose3D*> pose_ptrs;
  for (const auto& p : poses) pose_ptrs.push_back(&p);
  match_class<Pose3D>(next.active, kWorkerClass, pose_ptrs, frame, cfg, next.next_id);

  std::map<std::string, std::vector<const ObjectPoint3D*>> by_class;
  for (const auto& o : objects) by_class[o.object_class].push_back(&o);
  for (const auto& [cls, objs] : by_class) match_class<ObjectPoint3D>(next.active, cls, objs, frame, cfg, next.next_id);

  std::vector<Track> kept;
  for (auto& t : next.active) {
    if (frame - t.last_seen > cfg.max_gap)
      next.retired.push_back(std::move(t));
    else
      kept.push_back(std::move(t));
  }
  next.active = std::move(kept);
  return next;
}

}  // namespace siteguard
