#include "siteguard/scene.hpp"

#include <algorithm>
#include <random>
#include <variant>

#include "siteguard/errors.hpp"
#include "siteguard/tracking.hpp"

namespace siteguard {

namespace {

const std::vector<std::string> kScenarios = {"hardhat", "ladder", "window", "platform", "mixed"};

int minimum_worker_count(const std::string& scenario) {
  if (scenario == "hardhat") return 1;
  if (scenario == "mixed") return 4;
  return 2;
}

struct WorkerKey {
  double t;
  Eigen::Vector3d base;  // ground position, z = standing height above floor
};

struct WorkerScript {
  double height = 1.8;
  std::vector<WorkerKey> keys;
};

struct Fixed {
  Eigen::Vector3d p;
};
struct Worn {
  int worker;
};
struct Relative {
  int worker;
  Eigen::Vector3d offset;
};
struct Between {
  int a, b;
  double z;
};
using Placement = std::variant<Fixed, Worn, Relative, Between>;

struct ObjectKey {
  double t;
  Placement at;
};

struct ObjectScript {
  std::string object_class;
  double size_m = 0.3;
  std::vector<ObjectKey> keys;
};

struct Script {
  std::vector<WorkerScript> workers;
  std::vector<ObjectScript> objects;
};

// Piecewise-linear interpolation over keyframes, clamped at both ends.
template <typename Key, typename Eval>
auto blend(const std::vector<Key>& keys, double t, Eval eval) {
  if (t <= keys.front().t) return eval(keys.front(), t);
  if (t >= keys.back().t) return eval(keys.back(), t);
  std::size_t i = 0;
  while (keys[i + 1].t < t) ++i;
  const double span = keys[i + 1].t - keys[i].t;
  const double s = span > 0.0 ? (t - keys[i].t) / span : 1.0;
  return ((1.0 - s) * eval(keys[i], t) + s * eval(keys[i + 1], t)).eval();
}

Eigen::Vector3d worker_base(const WorkerScript& w, double t) {
  return blend(w.keys, t, [](const WorkerKey& k, double) -> Eigen::Vector3d { return k.base; });
}

Pose3D place(const Pose3D& canonical, const Eigen::Vector3d& base) {
  Pose3D p = canonical;
  for (auto& j : p.joints) j.position += base;
  return p;
}

Eigen::Vector3d neck_of(const Pose3D& p) { return 0.5 * (p.at(Joint::shoulder_l) + p.at(Joint::shoulder_r)); }

Eigen::Vector3d worn_point(double height, const Eigen::Vector3d& base) {
  return neck_of(place(canonical_skeleton(height), base)) + Eigen::Vector3d(0.0, 0.0, kWornHatAboveNeck * height);
}

Eigen::Vector3d placement_point(const Script& s, const Placement& at, double t) {
  return std::visit(
      [&](const auto& p) -> Eigen::Vector3d {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Fixed>) {
          return p.p;
        } else if constexpr (std::is_same_v<P, Worn>) {
          const auto& w = s.workers.at(p.worker);
          return worn_point(w.height, worker_base(w, t));
        } else if constexpr (std::is_same_v<P, Relative>) {
          return worker_base(s.workers.at(p.worker), t) + p.offset;
        } else {
          const Eigen::Vector3d mid =
              0.5 * (worker_base(s.workers.at(p.a), t) + worker_base(s.workers.at(p.b), t));
          return {mid.x(), mid.y(), p.z};
        }
      },
      at);
}

Eigen::Vector3d object_point(const Script& s, const ObjectScript& o, double t) {
  return blend(o.keys, t, [&](const ObjectKey& k, double tt) { return placement_point(s, k.at, tt); });
}

WorkerScript still(double height, const Eigen::Vector3d& base) { return {height, {{0.0, base}}}; }

ObjectScript worn_hat(int worker) { return {"hardhat", 0.25, {{0.0, Worn{worker}}}}; }

// Point `dist` meters beyond `p` on the horizontal line of sight from `eye`.
Eigen::Vector3d behind_along_sight(const Eigen::Vector3d& eye, const Eigen::Vector3d& p, double dist) {
  Eigen::Vector3d d = p - eye;
  d.z() = 0.0;
  return p + dist * d.normalized();
}

Script hardhat_script(const std::vector<double>& h) {
  Script s;
  s.workers.push_back({h[0], {{0.0, {-0.7, 0.8, 0.0}}, {0.5, {-0.9, 1.1, 0.0}}, {1.0, {-0.6, 0.9, 0.0}}}});
  s.objects.push_back({"hardhat",
                       0.25,
                       {{0.0, Worn{0}},
                        {0.30, Worn{0}},
                        {0.34, Fixed{{-0.2, 1.6, 0.9}}},
                        {0.62, Fixed{{-0.2, 1.6, 0.9}}},
                        {0.66, Worn{0}},
                        {1.0, Worn{0}}}});
  if (h.size() > 1) {
    s.workers.push_back({h[1], {{0.0, {0.7, 1.2, 0.0}}, {0.6, {0.9, 0.9, 0.0}}, {1.0, {0.6, 1.2, 0.0}}}});
    s.objects.push_back({"hardhat",
                         0.25,
                         {{0.0, Worn{1}},
                          {0.45, Worn{1}},
                          {0.49, Fixed{{1.3, 1.6, 0.9}}},
                          {0.80, Fixed{{1.3, 1.6, 0.9}}},
                          {0.84, Worn{1}},
                          {1.0, Worn{1}}}});
  }
  s.objects.push_back({"step_ladder", 1.0, {{0.0, Fixed{{-2.0, 2.6, 1.2}}}}});
  return s;
}

Script ladder_script(const std::vector<double>& h) {
  Script s;
  s.workers.push_back({h[0],
                       {{0.0, {-1.8, 0.0, 0.0}},
                        {0.05, {-1.8, 0.0, 0.0}},
                        {0.15, {-0.5, 0.75, 0.0}},
                        {0.22, {-0.5, 0.75, 0.0}},
                        {0.26, {-0.5, 0.75, 0.3}},
                        {0.75, {-0.5, 0.75, 0.3}},
                        {0.79, {-0.5, 0.75, 0.0}},
                        {0.88, {-1.8, 0.0, 0.0}}}});
  s.workers.push_back({h[1],
                       {{0.0, {1.2, 0.2, 0.0}},
                        {0.10, {1.2, 0.2, 0.0}},
                        {0.20, {-0.5, 1.35, 0.0}},
                        {0.45, {-0.5, 1.35, 0.0}},
                        {0.55, {1.5, 1.5, 0.0}}}});
  s.objects.push_back(worn_hat(0));
  s.objects.push_back(worn_hat(1));
  s.objects.push_back({"step_ladder", 1.0, {{0.0, Fixed{{-0.5, 1.0, 1.2}}}}});
  return s;
}

Script window_script(const std::vector<double>& h) {
  Script s;
  s.workers.push_back({h[0],
                       {{0.0, {-0.6, 0.6, 0.0}},
                        {0.06, {-0.6, 0.6, 0.0}},
                        {0.18, {0.35, 1.8, 0.0}},
                        {0.29, {0.35, 1.8, 0.0}},
                        {0.42, {-0.5, 1.0, 0.0}},
                        {0.55, {-0.5, 1.0, 0.0}},
                        {0.78, {-1.95, 1.0, 0.0}},
                        {0.86, {-1.95, 1.0, 0.0}},
                        {0.95, {-1.6, -0.3, 0.0}}}});
  s.workers.push_back({h[1],
                       {{0.0, {1.9, 0.9, 0.0}},
                        {0.10, {1.9, 0.9, 0.0}},
                        {0.22, {1.25, 1.8, 0.0}},
                        {0.29, {1.25, 1.8, 0.0}},
                        {0.42, {0.4, 1.0, 0.0}},
                        {0.49, {0.4, 1.0, 0.0}},
                        {0.58, {1.8, 0.3, 0.0}}}});
  s.objects.push_back(worn_hat(0));
  s.objects.push_back(worn_hat(1));
  const Eigen::Vector3d carried(0.45, 0.0, 1.1);
  s.objects.push_back({"large_window",
                       1.0,
                       {{0.0, Fixed{{0.8, 1.8, 0.6}}},
                        {0.25, Fixed{{0.8, 1.8, 0.6}}},
                        {0.29, Between{0, 1, 1.1}},
                        {0.45, Between{0, 1, 1.1}},
                        {0.49, Relative{0, carried}},
                        {0.80, Relative{0, carried}},
                        {0.84, Fixed{{-1.5, 1.0, 0.6}}}}});
  s.objects.push_back({"small_window", 0.5, {{0.0, Fixed{{1.8, 2.0, 0.5}}}}});
  return s;
}

Script platform_script(const std::vector<double>& h) {
  Script s;
  s.workers.push_back({h[0],
                       {{0.0, {-1.0, 0.0, 0.0}},
                        {0.08, {-1.0, 0.0, 0.0}},
                        {0.16, {0.25, 0.1, 0.0}},
                        {0.18, {0.25, 0.1, 0.0}},
                        {0.22, {0.25, 1.2, 0.5}},
                        {0.85, {0.25, 1.2, 0.5}},
                        {0.89, {0.5, 0.2, 0.0}},
                        {0.97, {-1.1, -0.2, 0.0}}}});
  s.workers.push_back({h[1],
                       {{0.0, {1.9, 0.3, 0.0}},
                        {0.30, {1.9, 0.3, 0.0}},
                        {0.40, {0.75, 0.1, 0.0}},
                        {0.43, {0.75, 0.1, 0.0}},
                        {0.47, {0.75, 1.2, 0.5}},
                        {0.65, {0.75, 1.2, 0.5}},
                        {0.69, {1.9, 1.2, 0.0}}}});
  s.objects.push_back(worn_hat(0));
  s.objects.push_back(worn_hat(1));
  s.objects.push_back({"platform", 1.2, {{0.0, Fixed{{0.5, 1.2, 0.25}}}}});
  return s;
}

// Occlusion-heavy scene: every violation is staged so that the front camera
// alone sees a compliant-looking picture.
Script mixed_script(const std::vector<double>& h, const CameraRigSpec& rig) {
  const Eigen::Vector3d eye = camera_position_scene(rig, 0);
  Script s;

  s.workers.push_back({h[0],
                       {{0.0, {0.0, 0.0, 0.0}},
                        {0.49, {0.0, 0.0, 0.0}},
                        {0.56, {0.8, 0.5, 0.0}},
                        {0.58, {0.8, 0.5, 0.0}},
                        {0.62, {1.55, 1.0, 0.5}},
                        {0.80, {1.55, 1.0, 0.5}},
                        {0.84, {0.8, 0.5, 0.0}},
                        {0.95, {0.0, 0.0, 0.0}}}});

  const Eigen::Vector3d ladder(-1.6, 1.0, 1.2);
  Eigen::Vector3d behind_ladder = behind_along_sight(eye, ladder, 1.0);
  behind_ladder.z() = 0.0;
  s.workers.push_back({h[1],
                       {{0.0, {-1.6, 0.75, 0.3}},
                        {0.40, {-1.6, 0.75, 0.3}},
                        {0.44, {-1.6, 0.6, 0.0}},
                        {0.52, {0.45, 2.2, 0.0}},
                        {0.69, {0.45, 2.2, 0.0}},
                        {0.78, {0.1, 1.6, 0.0}}}});
  const Eigen::Vector3d w1_final(0.1, 1.6, 0.0);
  Eigen::Vector3d behind_w1 = behind_along_sight(eye, w1_final, 1.0);
  behind_w1.z() = 0.0;
  s.workers.push_back({h[2],
                       {{0.0, {-1.6, 1.35, 0.0}},
                        {0.25, {-1.6, 1.35, 0.0}},
                        {0.33, behind_ladder},
                        {0.50, behind_ladder},
                        {0.60, {-0.45, 2.2, 0.0}},
                        {0.69, {-0.45, 2.2, 0.0}},
                        {0.78, {-0.8, 1.6, 0.0}},
                        {0.80, {-0.8, 1.6, 0.0}},
                        {0.84, behind_w1}}});
  s.workers.push_back(still(h[3], {2.1, 1.0, 0.5}));

  const Eigen::Vector3d worn0 = worn_point(h[0], Eigen::Vector3d::Zero());
  const Eigen::Vector3d table = worn0 + 0.6 * (worn0 - eye).normalized();
  s.objects.push_back({"hardhat",
                       0.25,
                       {{0.0, Worn{0}},
                        {0.20, Worn{0}},
                        {0.24, Fixed{table}},
                        {0.45, Fixed{table}},
                        {0.49, Worn{0}},
                        {1.0, Worn{0}}}});
  for (int w = 1; w < 4; ++w) s.objects.push_back(worn_hat(w));
  s.objects.push_back({"step_ladder", 1.0, {{0.0, Fixed{ladder}}}});
  s.objects.push_back({"platform", 1.2, {{0.0, Fixed{{1.8, 1.0, 0.25}}}}});
  s.objects.push_back({"large_window",
                       1.0,
                       {{0.0, Fixed{{0.0, 2.2, 0.6}}},
                        {0.65, Fixed{{0.0, 2.2, 0.6}}},
                        {0.69, Between{1, 2, 1.1}},
                        {0.80, Between{1, 2, 1.1}},
                        {0.84, Relative{1, {-0.45, 0.0, 1.1}}}}});
  return s;
}

// Extra workers stroll along the back of the scene wearing hats.
void add_bystanders(Script& s, const std::vector<double>& h) {
  for (std::size_t i = s.workers.size(); i < h.size(); ++i) {
    const double x = -1.8 + 1.2 * static_cast<double>(i);
    s.workers.push_back({h[i], {{0.0, {x, 3.2, 0.0}}, {0.5, {x + 0.4, 3.0, 0.0}}, {1.0, {x, 3.2, 0.0}}}});
    s.objects.push_back(worn_hat(static_cast<int>(i)));
  }
}

Json wall_to_json(const OccluderWall& w) {
  return {{"a", {w.a.x(), w.a.y()}}, {"b", {w.b.x(), w.b.y()}}, {"z_min", w.z_min}, {"z_max", w.z_max}};
}

OccluderWall wall_from_json(const Json& j) {
  OccluderWall w;
  const auto a = j.at("a").get<std::vector<double>>();
  const auto b = j.at("b").get<std::vector<double>>();
  if (a.size() != 2 || b.size() != 2) throw Error(ErrorCode::InvalidConfig, "wall endpoints need 2 coordinates");
  w.a = {a[0], a[1]};
  w.b = {b[0], b[1]};
  w.z_min = j.value("z_min", 0.0);
  w.z_max = j.value("z_max", 2.0);
  return w;
}

}  // namespace

void validate(const ScenarioSpec& spec) {
  const auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, "scenario: " + msg); };
  if (std::find(kScenarios.begin(), kScenarios.end(), spec.scenario) == kScenarios.end())
    throw Error(ErrorCode::UnknownScenario, "unknown scenario '" + spec.scenario + "'");
  if (spec.frames < 1) fail("frames must be >= 1");
  if (spec.workers != 0 && (spec.workers < minimum_worker_count(spec.scenario) || spec.workers > 4))
    fail("workers for " + spec.scenario + " must lie in [" + std::to_string(minimum_worker_count(spec.scenario)) +
         ", 4]");
  if (!(spec.noise_px >= 0.0)) fail("noise_px must be >= 0");
  for (double p : {spec.joint_dropout, spec.view_dropout})
    if (!(p >= 0.0 && p <= 1.0)) fail("probabilities must lie in [0, 1]");
  for (const auto& w : spec.occluder_walls)
    if ((w.a - w.b).norm() <= 0.0 || !(w.z_max > w.z_min)) fail("occluder wall is degenerate");
  validate(spec.rig);
}

ScenarioSpec scenario_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "scenario spec must be an object");
  ScenarioSpec s;
  try {
    s.scenario = j.value("scenario", s.scenario);
    s.frames = j.value("frames", s.frames);
    s.workers = j.value("workers", s.workers);
    s.seed = j.value("seed", s.seed);
    s.noise_px = j.value("noise_px", s.noise_px);
    s.joint_dropout = j.value("joint_dropout", s.joint_dropout);
    s.view_dropout = j.value("view_dropout", s.view_dropout);
    if (j.contains("occluder_walls"))
      for (const auto& w : j.at("occluder_walls")) s.occluder_walls.push_back(wall_from_json(w));
    if (j.contains("rig")) {
      const Json& r = j.at("rig");
      s.rig.count = r.value("count", s.rig.count);
      if (r.contains("radius_m")) {
        const auto rr = r.at("radius_m").get<std::vector<double>>();
        if (rr.size() != 2) throw Error(ErrorCode::InvalidConfig, "rig.radius_m needs [min, max]");
        s.rig.radius_min = rr[0];
        s.rig.radius_max = rr[1];
      }
      s.rig.height = r.value("height_m", s.rig.height);
      s.rig.fov_deg = r.value("fov_deg", s.rig.fov_deg);
      if (r.contains("image")) {
        const auto im = r.at("image").get<std::vector<int>>();
        if (im.size() != 2) throw Error(ErrorCode::InvalidConfig, "rig.image needs [width, height]");
        s.rig.width = im[0];
        s.rig.image_height = im[1];
      }
      s.rig.target_height = r.value("target_height_m", s.rig.target_height);
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("scenario spec: ") + e.what());
  }
  validate(s);
  return s;
}

Json to_json(const ScenarioSpec& spec) {
  Json walls = Json::array();
  for (const auto& w : spec.occluder_walls) walls.push_back(wall_to_json(w));
  return {{"scenario", spec.scenario},
          {"frames", spec.frames},
          {"workers", spec.workers},
          {"seed", spec.seed},
          {"noise_px", spec.noise_px},
          {"joint_dropout", spec.joint_dropout},
          {"view_dropout", spec.view_dropout},
          {"occluder_walls", walls},
          {"rig",
           {{"count", spec.rig.count},
            {"radius_m", {spec.rig.radius_min, spec.rig.radius_max}},
            {"height_m", spec.rig.height},
            {"fov_deg", spec.rig.fov_deg},
            {"image", {spec.rig.width, spec.rig.image_height}},
            {"target_height_m", spec.rig.target_height}}}};
}

std::vector<OccluderWall> default_occluders(const std::string& scenario) {
  if (scenario != "mixed") return {};
  return {OccluderWall{{1.0, 0.2}, {2.6, 0.2}, 0.0, 1.3}};
}

const std::vector<std::string>& scenario_names() { return kScenarios; }

int natural_worker_count(const std::string& scenario) {
  if (std::find(kScenarios.begin(), kScenarios.end(), scenario) == kScenarios.end())
    throw Error(ErrorCode::UnknownScenario, "unknown scenario '" + scenario + "'");
  return scenario == "mixed" ? 4 : 2;
}

Pose3D canonical_skeleton(double height) {
  static const std::array<Eigen::Vector3d, kNumJoints> kCanonical{{
      {0.0, 0.09, 1.80},
      {-0.032, 0.075, 1.83},
      {0.032, 0.075, 1.83},
      {-0.075, 0.0, 1.81},
      {0.075, 0.0, 1.81},
      {-0.19, 0.0, 1.55},
      {0.19, 0.0, 1.55},
      {-0.22, 0.02, 1.25},
      {0.22, 0.02, 1.25},
      {-0.24, 0.06, 0.98},
      {0.24, 0.06, 0.98},
      {-0.11, 0.0, 0.98},
      {0.11, 0.0, 0.98},
      {-0.11, 0.03, 0.52},
      {0.11, 0.03, 0.52},
      {-0.11, 0.0, 0.0},
      {0.11, 0.0, 0.0},
  }};
  const double s = height / 1.8;
  Pose3D p;
  for (std::size_t j = 0; j < kNumJoints; ++j) p.joints[j] = {s * kCanonical[j], true};
  return p;
}

GeneratedScene generate_scene(const ScenarioSpec& spec) {
  validate(spec);
  const int n_workers = spec.workers != 0 ? spec.workers : natural_worker_count(spec.scenario);

  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32), 0x5ce7eu};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> height_dist(1.6, 1.95);
  std::vector<double> heights;
  for (int i = 0; i < n_workers; ++i) heights.push_back(height_dist(rng));

  const int natural = natural_worker_count(spec.scenario);
  const std::vector<double> scripted(heights.begin(), heights.begin() + std::min(n_workers, natural));
  Script script;
  if (spec.scenario == "hardhat")
    script = hardhat_script(scripted);
  else if (spec.scenario == "ladder")
    script = ladder_script(scripted);
  else if (spec.scenario == "window")
    script = window_script(scripted);
  else if (spec.scenario == "platform")
    script = platform_script(scripted);
  else
    script = mixed_script(scripted, spec.rig);
  add_bystanders(script, heights);

  const Eigen::Isometry3d to_world = scene_to_world(spec.rig);
  const int n_objects = static_cast<int>(script.objects.size());
  GeneratedScene out;
  for (int f = 0; f < spec.frames; ++f) {
    const double t = spec.frames > 1 ? static_cast<double>(f) / (spec.frames - 1) : 0.0;
    FrameState state;
    state.frame = f;
    for (int w = 0; w < n_workers; ++w) {
      const auto& ws = script.workers[w];
      Pose3D pose = place(canonical_skeleton(ws.height), worker_base(ws, t));
      for (auto& j : pose.joints) j.position = to_world * j.position;
      state.workers.push_back({w, ws.height, pose});
    }
    for (int o = 0; o < n_objects; ++o) {
      const auto& os = script.objects[o];
      state.objects.push_back({n_workers + o, os.object_class, to_world * object_point(script, os, t), os.size_m});
    }
    out.trajectory.push_back(std::move(state));
  }
  out.truth = label_trajectory(out.trajectory, default_rules());
  return out;
}

std::vector<TruthRecord> label_trajectory(const std::vector<FrameState>& trajectory,
                                          const std::vector<ViolationRule>& rules) {
  ComplianceEngine engine(rules);
  std::map<int, std::vector<double>> height_samples;
  std::vector<TruthRecord> out;
  for (const auto& state : trajectory) {
    std::vector<Track> workers, objects;
    for (const auto& w : state.workers) {
      Track t;
      t.track_id = w.id;
      t.entity_class = kWorkerClass;
      t.history.push_back({state.frame, w.pose});
      t.last_seen = state.frame;
      auto& samples = height_samples[w.id];
      if (const auto h = estimate_worker_height(w.pose)) samples.push_back(*h);
      t.height_samples = samples;
      if (!samples.empty()) t.worker_height = median(samples);
      workers.push_back(std::move(t));
    }
    for (const auto& o : state.objects) {
      Track t;
      t.track_id = o.id;
      t.entity_class = o.object_class;
      t.history.push_back({state.frame, ObjectPoint3D{o.object_class, o.position}});
      t.last_seen = state.frame;
      objects.push_back(std::move(t));
    }
    for (const auto& e : engine.step(workers, objects, state.frame)) {
      TruthRecord r;
      r.frame = e.frame;
      r.rule_id = e.rule_id;
      r.entity_ids.push_back(e.key_entity());
      for (int w : e.worker_track_ids)
        if (w != r.entity_ids.front()) r.entity_ids.push_back(w);
      r.violated = e.violated;
      out.push_back(std::move(r));
    }
  }
  return out;
}

Json to_json(const TruthRecord& rec) {
  return Json{{"frame", rec.frame}, {"rule_id", rec.rule_id}, {"entity_ids", rec.entity_ids},
              {"violated", rec.violated}};
}

std::string serialize_truth(const std::vector<TruthRecord>& truth) {
  std::string out;
  for (const auto& r : truth) {
    OrderedJson j;
    j["frame"] = r.frame;
    j["rule_id"] = r.rule_id;
    j["entity_ids"] = r.entity_ids;
    j["violated"] = r.violated;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace siteguard
