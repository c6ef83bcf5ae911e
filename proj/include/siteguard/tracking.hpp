#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "siteguard/skeleton.hpp"

namespace siteguard {

using EntityState = std::variant<Pose3D, ObjectPoint3D>;

struct TrackEntry {
  int frame = 0;
  EntityState state;
};

struct Track {
  int track_id = 0;
  std::string entity_class;
  std::vector<TrackEntry> history;  // strictly increasing frames
  int last_seen = 0;
  std::vector<double> height_samples;  // per-frame worker height estimates
  std::optional<double> worker_height;  // running median of height_samples

  bool is_worker() const { return entity_class == kWorkerClass; }
  const TrackEntry& latest() const { return history.back(); }
  const Pose3D& latest_pose() const { return std::get<Pose3D>(history.back().state); }
  const ObjectPoint3D& latest_object() const { return std::get<ObjectPoint3D>(history.back().state); }
  bool seen_at(int frame) const { return last_seen == frame; }
};

struct TrackingConfig {
  double psi = 0.5;  // meters
  int max_gap = 5;   // frames a track survives unmatched
};

void validate(const TrackingConfig& cfg);

struct TrackerState {
  std::vector<Track> active;
  std::vector<Track> retired;
  int next_id = 0;
  std::optional<int> last_frame;
};

// Mean 3D distance over shared present joints; when none are shared, the xy
// distance between present-joint centroids.
double track_cost(const Pose3D& prev, const Pose3D& curr);
double track_cost(const ObjectPoint3D& prev, const ObjectPoint3D& curr);

// Nose to mean-ankle vertical extent.
std::optional<double> estimate_worker_height(const Pose3D& pose);
double median(std::vector<double> values);

// Pure: returns the successor state. Throws NonMonotonicFrame when `frame`
// does not exceed the previous frame.
TrackerState update_tracks(const TrackerState& state, const std::vector<Pose3D>& poses,
                           const std::vector<ObjectPoint3D>& objects, int frame, const TrackingConfig& cfg);

}  // namespace siteguard
