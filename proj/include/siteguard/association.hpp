#pragma once

#include <vector>

#include <Eigen/Core>

#include "siteguard/detection.hpp"
#include "siteguard/epipolar.hpp"

namespace siteguard {

struct AssociationConfig {
  double phi = 0.5;     // detection / joint confidence threshold
  double theta = 20.0;  // match confirmation threshold, pixels in geometric mode
  DistanceMode distance_mode = DistanceMode::geometric;
};

void validate(const AssociationConfig& cfg);

std::vector<Detection2D> filter_detections(const std::vector<Detection2D>& dets, double phi);

// `view_of` maps a camera id to its position in the FundamentalSet.
class ViewIndex {
 public:
  ViewIndex() = default;
  explicit ViewIndex(const std::vector<int>& camera_ids);
  std::size_t of(int camera_id) const;
  std::size_t size() const { return ids_.size(); }
  const std::vector<int>& ids() const { return ids_; }

 private:
  std::vector<int> ids_;
};

// Double mean over members and shared present joints of the pairwise
// epipolar distance. Members sharing no joints are skipped; +inf when no
// member shares any.
double selection_cost_worker(const Detection2D& det, const CrossViewSelection& sel, const FundamentalSet& fmats,
                             const ViewIndex& views, const AssociationConfig& cfg);

// Single-keypoint variant with a class gate (+inf across categories).
double selection_cost_object(const Detection2D& det, const CrossViewSelection& sel, const FundamentalSet& fmats,
                             const ViewIndex& views, const AssociationConfig& cfg);

double selection_cost(const Detection2D& det, const CrossViewSelection& sel, const FundamentalSet& fmats,
                      const ViewIndex& views, const AssociationConfig& cfg);

struct FrameSelections {
  std::vector<CrossViewSelection> workers;
  std::vector<CrossViewSelection> objects;
};

enum class Execution { serial, parallel };

// Greedy view-by-view association. dets_per_view[v] holds the detections of
// the camera at position v of `views`. Throws MismatchedCameraCount.
FrameSelections associate_frame(const std::vector<std::vector<Detection2D>>& dets_per_view,
                                const FundamentalSet& fmats, const ViewIndex& views, const AssociationConfig& cfg,
                                Execution exec = Execution::parallel);

}  // namespace siteguard
