#include "siteguard/render_detections.hpp"

#include <algorithm>
#include <random>

#include "siteguard/detail/exception_slot.hpp"

namespace siteguard {

bool segment_hits_wall(const Eigen::Vector3d& from, const Eigen::Vector3d& to, const OccluderWall& wall) {
  const Eigen::Vector2d p = from.head<2>();
  const Eigen::Vector2d d = to.head<2>() - p;
  const Eigen::Vector2d e = wall.b - wall.a;
  const double denom = d.x() * e.y() - d.y() * e.x();
  if (std::abs(denom) < 1e-12) return false;
  const Eigen::Vector2d w = wall.a - p;
  const double s = (w.x() * e.y() - w.y() * e.x()) / denom;
  const double r = (w.x() * d.y() - w.y() * d.x()) / denom;
  if (s <= 0.0 || s >= 1.0 || r < 0.0 || r > 1.0) return false;
  const double z = from.z() + s * (to.z() - from.z());
  return z >= wall.z_min && z <= wall.z_max;
}

namespace {

struct Corruption {
  double noise_px;
  double joint_dropout;
  double view_dropout;
};

class Substream {
 public:
  Substream(std::uint64_t seed, int frame, int camera) : unit_(0.0, 1.0), conf_(0.6, 1.0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(frame), static_cast<std::uint32_t>(camera), 0xde7ec7u};
    rng_.seed(seq);
  }

  bool chance(double p) { return unit_(rng_) < p; }
  double confidence() { return conf_(rng_); }
  double gaussian(double sigma) {
    if (sigma <= 0.0) return 0.0;
    return std::normal_distribution<double>(0.0, sigma)(rng_);
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_;
  std::uniform_real_distribution<double> conf_;
};

// Projected, corrupted point or absent.
Point2D observe(const CameraParams& cam, const Eigen::Vector3d& x, const std::vector<OccluderWall>& walls,
                const Corruption& c, Substream& rs) {
  const double du = rs.gaussian(c.noise_px);
  const double dv = rs.gaussian(c.noise_px);
  const bool dropped = rs.chance(c.joint_dropout);
  const double conf = rs.confidence();
  if (dropped || cam.to_camera(x).z() <= 1e-9) return Point2D::absent();
  const Eigen::Vector3d center = cam.center();
  for (const auto& w : walls)
    if (segment_hits_wall(center, x, w)) return Point2D::absent();
  Point2D p = project(cam, x);
  p.u += du;
  p.v += dv;
  p.confidence = conf;
  if (!cam.in_image(p)) return Point2D::absent();
  return p;
}

std::vector<DetectionRecord> render_view(const FrameState& state, const CameraParams& cam,
                                         const std::vector<OccluderWall>& walls, const Corruption& c,
                                         std::uint64_t seed) {
  Substream rs(seed, state.frame, cam.id);
  std::vector<DetectionRecord> out;
  for (const auto& w : state.workers) {
    const bool vanished = rs.chance(c.view_dropout);
    Detection2D d;
    d.camera_id = cam.id;
    d.entity_class = kWorkerClass;
    d.detection_confidence = rs.confidence();
    bool any = false;
    BBox box{1e300, 1e300, -1e300, -1e300};
    for (const auto& j : w.pose.joints) {
      Point2D p = j.present ? observe(cam, j.position, walls, c, rs) : Point2D::absent();
      if (p.present) {
        any = true;
        box.u_min = std::min(box.u_min, p.u);
        box.v_min = std::min(box.v_min, p.v);
        box.u_max = std::max(box.u_max, p.u);
        box.v_max = std::max(box.v_max, p.v);
      }
      d.keypoints.push_back(p);
    }
    if (vanished || !any) continue;
    d.bbox = box;
    out.push_back({state.frame, std::move(d)});
  }
  for (const auto& o : state.objects) {
    const bool vanished = rs.chance(c.view_dropout);
    const double det_conf = rs.confidence();
    const Point2D p = observe(cam, o.position, walls, c, rs);
    if (vanished || !p.present) continue;
    Detection2D d;
    d.camera_id = cam.id;
    d.entity_class = o.object_class;
    d.detection_confidence = det_conf;
    d.keypoints.push_back(p);
    const double half = 0.5 * cam.intrinsics(0, 0) * o.size_m / cam.to_camera(o.position).z();
    d.bbox = BBox{p.u - half, p.v - half, p.u + half, p.v + half};
    out.push_back({state.frame, std::move(d)});
  }
  std::shuffle(out.begin(), out.end(), rs.engine());
  return out;
}

}  // namespace

std::vector<DetectionRecord> render_detections(const std::vector<FrameState>& trajectory,
                                               const std::vector<CameraParams>& cameras, const ScenarioSpec& spec,
                                               Execution exec) {
  const Eigen::Isometry3d to_world = scene_to_world(spec.rig);
  std::vector<OccluderWall> walls;
  for (const auto& w : spec.occluder_walls) {
    OccluderWall ww = w;
    ww.a = (to_world * Eigen::Vector3d(w.a.x(), w.a.y(), 0.0)).head<2>();
    ww.b = (to_world * Eigen::Vector3d(w.b.x(), w.b.y(), 0.0)).head<2>();
    walls.push_back(ww);
  }
  const Corruption c{spec.noise_px, spec.joint_dropout, spec.view_dropout};

  const long n = static_cast<long>(trajectory.size());
  std::vector<std::vector<DetectionRecord>> per_frame(trajectory.size());
  const auto body = [&](long f) {
    for (const auto& cam : cameras) {
      auto recs = render_view(trajectory[f], cam, walls, c, spec.seed);
      per_frame[f].insert(per_frame[f].end(), std::make_move_iterator(recs.begin()),
                          std::make_move_iterator(recs.end()));
    }
  };
  if (exec == Execution::parallel) {
    detail::ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic)
    for (long f = 0; f < n; ++f) slot.run([&] { body(f); });
    slot.rethrow();
  } else {
    for (long f = 0; f < n; ++f) body(f);
  }

  std::vector<DetectionRecord> out;
  for (auto& frame : per_frame)
    out.insert(out.end(), std::make_move_iterator(frame.begin()), std::make_move_iterator(frame.end()));
  return out;
}

}  // namespace siteguard
