#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unistd.h>

#include "siteguard/assignment.hpp"
#include "siteguard/epipolar.hpp"
#include "siteguard/evaluate.hpp"
#include "siteguard/pipeline.hpp"
#include "siteguard/render_detections.hpp"
#include "siteguard/triangulation.hpp"
#include "support.hpp"

using namespace siteguard;
using namespace testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int n, const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", n, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

ScenarioSpec scenario(const std::string& name, std::uint64_t seed) {
  ScenarioSpec s;
  s.scenario = name;
  s.seed = seed;
  return s;
}

double score(const std::vector<ViolationEvent>& events, const std::vector<TruthRecord>& truth) {
  return evaluate(parse_label_records(serialize_violations(events)), parse_label_records(serialize_truth(truth)))
      .mean_accuracy_pct;
}

Outcome noiseless_fidelity() {
  std::string detail;
  bool ok = true;
  for (const char* name : {"hardhat", "ladder", "window", "platform"}) {
    const auto t0 = std::chrono::steady_clock::now();
    const ScenarioSpec spec = scenario(name, 1);
    const auto g = generate_scene(spec);
    const auto rig = build_rig(spec.rig);
    const auto recs = render_detections(g.trajectory, rig, spec);
    const auto result = run_pipeline(PipelineConfig{}, rig, recs);
    const double acc = score(result.events, g.truth);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok = ok && acc == 100.0 && secs < 30.0;
    detail += std::string(name) + " " + fmt("%.2f%%", acc) + " in " + fmt("%.2fs", secs) + "; ";
  }
  return {ok, detail};
}

Outcome multiview_trend() {
  const std::vector<std::vector<int>> subsets{{0}, {0, 1}, {0, 1, 2}, {0, 1, 2, 3}};
  std::vector<double> sum(subsets.size(), 0.0);
  const int seeds = 20;
  for (int seed = 1; seed <= seeds; ++seed) {
    ScenarioSpec spec = scenario("mixed", static_cast<std::uint64_t>(seed));
    spec.noise_px = 2.0;
    spec.joint_dropout = 0.2;
    spec.occluder_walls = default_occluders("mixed");
    const auto g = generate_scene(spec);
    const auto rig = build_rig(spec.rig);
    const auto recs = render_detections(g.trajectory, rig, spec);
    for (std::size_t k = 0; k < subsets.size(); ++k) {
      PipelineConfig cfg;
      cfg.cameras = subsets[k];
      sum[k] += score(run_pipeline(cfg, rig, recs).events, g.truth);
    }
  }
  std::string detail = std::to_string(seeds) + " seeds, mean accuracy by views:";
  bool increasing = true;
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    sum[k] /= seeds;
    detail += " " + std::to_string(subsets[k].size()) + "v=" + fmt("%.2f%%", sum[k]);
    if (k > 0 && !(sum[k] > sum[k - 1])) increasing = false;
  }
  const double gap = sum.back() - sum.front();
  detail += "; gap " + fmt("%+.2f pp", gap);
  return {increasing && gap >= 3.0, detail};
}

Outcome assignment_exactness() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> value(0.0, 50.0), coin(0.0, 1.0);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int r = dim(rng), c = dim(rng);
    const double inf_rate = trial % 3 == 0 ? 0.3 : 0.0;
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = coin(rng) < inf_rate ? kInfiniteCost : value(rng);
    const auto a = solve_assignment(m);
    const auto [forbidden, best] = brute_force_assignment(m);
    const bool size_ok = static_cast<int>(a.size()) == std::min(r, c) - forbidden;
    if (!size_ok || std::abs(assignment_cost(m, a) - best) > 1e-9 * std::max(1.0, best)) ++mismatches;
  }
  return {mismatches == 0, "1000 matrices up to 6x6, " + std::to_string(mismatches) + " mismatches"};
}

Outcome geometry_suite() {
  const auto rig = default_rig();
  const FundamentalSet fm(rig);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> x(-2.0, 2.0), y(-1.0, 3.0), z(0.0, 2.5);
  std::uniform_int_distribution<int> views(2, 4);
  double worst_tri = 0.0, worst_res = 0.0, worst_transpose = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Eigen::Vector3d p = scene_point(CameraRigSpec{}, x(rng), y(rng), z(rng));
    std::vector<int> order{0, 1, 2, 3};
    std::shuffle(order.begin(), order.end(), rng);
    const int n = views(rng);
    std::vector<Observation> obs;
    for (int k = 0; k < n; ++k) obs.push_back({&rig[order[k]], project(rig[order[k]], p)});
    worst_tri = std::max(worst_tri, (triangulate_point(obs) - p).norm());
    const Point2D pa = project(rig[order[0]], p), pb = project(rig[order[1]], p);
    const auto& pair = fm.pair(order[0], order[1]);
    worst_res = std::max(worst_res, std::abs(pb.homogeneous().dot(pair.f_ij * pa.homogeneous())));
  }
  for (std::size_t a = 0; a < rig.size(); ++a)
    for (std::size_t b = 0; b < rig.size(); ++b) {
      if (a == b) continue;
      const auto& pair = fm.pair(a, b);
      worst_transpose = std::max(worst_transpose, 1.0 - std::abs(matrix_cosine(pair.f_ji, pair.f_ij.transpose())));
    }
  const bool ok = worst_tri < 1e-6 && worst_res < 1e-9 && worst_transpose < 1e-9;
  return {ok, "10000 triangulations max error " + fmt("%.2e m", worst_tri) + ", max |p'Fp| " + fmt("%.2e", worst_res) +
                  ", transpose defect " + fmt("%.2e", worst_transpose)};
}

// Scripted clip: worker without a hat (violation), then occluded, then
// wearing the hat. `occlude` removes or mutilates the worker's detections.
struct LatchClip {
  int first_occluded;
  int first_rewear;
  int frames;
};

std::vector<FrameState> latch_trajectory(const LatchClip& clip) {
  const CameraRigSpec rig;
  const Pose3D pose = standing_worker(scene_point(rig, 0.0, 0.8, 0.0));
  const Eigen::Vector3d worn = neck_of(pose) + Eigen::Vector3d(0, 0, 0.07 * 1.8);
  const Eigen::Vector3d table = scene_point(rig, 1.5, 2.0, 0.9);
  std::vector<FrameState> out;
  for (int f = 0; f < clip.frames; ++f) {
    FrameState s;
    s.frame = f;
    s.workers.push_back({0, 1.8, pose});
    s.objects.push_back({1, "hardhat", f >= clip.first_rewear ? worn : table, 0.3});
    out.push_back(s);
  }
  return out;
}

std::string check_latch(const LatchClip& clip, bool whole_worker) {
  const auto rig = default_rig();
  const auto traj = latch_trajectory(clip);
  auto recs = render_detections(traj, rig, ScenarioSpec{}, Execution::serial);
  std::vector<DetectionRecord> kept;
  for (auto& r : recs) {
    const bool occluded = r.frame >= clip.first_occluded && r.frame < clip.first_rewear && r.detection.is_worker();
    if (occluded && whole_worker) continue;
    if (occluded)
      for (Joint j : {Joint::shoulder_l, Joint::shoulder_r}) r.detection.keypoints[idx(j)] = Point2D::absent();
    kept.push_back(r);
  }
  PipelineConfig cfg;
  cfg.rules = {default_rules()[0]};
  const auto result = run_pipeline(cfg, rig, kept);
  std::map<int, const ViolationEvent*> by_frame;
  for (const auto& e : result.events)
    if (e.rule_id == "no_hardhat" && e.worker_track_ids == std::vector<int>{0}) by_frame[e.frame] = &e;
  for (int f = 0; f < clip.first_occluded; ++f)
    if (!by_frame.count(f) || !by_frame[f]->violated || by_frame[f]->latched)
      return "frame " + std::to_string(f) + " should be an observed violation";
  for (int f = clip.first_occluded; f < clip.first_rewear; ++f)
    if (!by_frame.count(f) || !by_frame[f]->violated || !by_frame[f]->latched)
      return "occluded frame " + std::to_string(f) + " not latched";
  int cleared = -1;
  for (int f = clip.first_rewear; f < clip.frames; ++f)
    if (by_frame.count(f) && !by_frame[f]->violated) {
      cleared = f;
      break;
    }
  if (cleared < 0 || cleared > clip.first_rewear + 1) return "violation not cleared after re-association";
  for (int f = cleared; f < clip.frames; ++f)
    if (by_frame.count(f) && by_frame[f]->violated) return "violation returned at frame " + std::to_string(f);
  return "";
}

Outcome latching() {
  const LatchClip track_lost{10, 15, 25};   // whole worker hidden for 5 frames
  const LatchClip neck_hidden{10, 30, 40};  // shoulders hidden for 20 frames
  const std::string a = check_latch(track_lost, true);
  const std::string b = check_latch(neck_hidden, false);
  if (!a.empty()) return {false, "hidden worker: " + a};
  if (!b.empty()) return {false, "hidden shoulders: " + b};
  return {true, "latched on every occluded frame (5 frames hidden, 20 frames without neck), cleared on re-association"};
}

Outcome threshold_boundary() {
  const Pose3D p = standing_worker({0, 0, 0});
  const Eigen::Vector3d neck = neck_of(p);
  WorkerObservation w;
  w.id = 0;
  w.anchors = derive_semantic_joints(p);
  w.centroid = p.centroid();
  w.height = 1.8;
  const ViolationRule rule = default_rules()[0];
  const auto at = [&](double d) {
    const std::vector<ObjectObservation> os{{1, "hardhat", neck + Eigen::Vector3d(0, 0, d), true}};
    return evaluate_attachment(rule, std::span<const WorkerObservation>(&w, 1), os, 0)[0].violated;
  };
  const bool near = at(0.17), far = at(0.19);
  return {!near && far, std::string("0.17 m -> ") + (near ? "violated" : "compliant") + ", 0.19 m -> " +
                            (far ? "violated" : "compliant") + " (tau = 0.18 m, strict <)"};
}

Outcome tracking_stability() {
  const ScenarioSpec spec = scenario("hardhat", 5);
  const auto g = generate_scene(spec);
  const auto rig = build_rig(spec.rig);
  const auto result = run_pipeline(PipelineConfig{}, rig, render_detections(g.trajectory, rig, spec));

  double min_sep = 1e300;
  for (const auto& s : g.trajectory)
    min_sep = std::min(min_sep, (s.workers[0].pose.centroid()->head<2>() - s.workers[1].pose.centroid()->head<2>()).norm());

  std::map<int, int> last_track;  // true worker -> track id
  int switches = 0;
  std::set<int> worker_tracks;
  std::vector<const Track*> tracks;
  for (const auto& t : result.tracks.active) tracks.push_back(&t);
  for (const auto& t : result.tracks.retired) tracks.push_back(&t);
  for (const auto& s : g.trajectory) {
    for (const auto* t : tracks) {
      if (!t->is_worker()) continue;
      for (const auto& e : t->history) {
        if (e.frame != s.frame) continue;
        worker_tracks.insert(t->track_id);
        const Eigen::Vector3d c = *std::get<Pose3D>(e.state).centroid();
        int nearest = 0;
        for (std::size_t w = 1; w < s.workers.size(); ++w)
          if ((*s.workers[w].pose.centroid() - c).norm() < (*s.workers[nearest].pose.centroid() - c).norm())
            nearest = static_cast<int>(w);
        const auto it = last_track.find(nearest);
        if (it != last_track.end() && it->second != t->track_id) ++switches;
        last_track[nearest] = t->track_id;
      }
    }
  }

  TrackerState st;
  std::vector<Pose3D> poses{standing_worker({0, 0, 0}), standing_worker({3, 0, 0})};
  for (int f = 0; f < 10; ++f) st = update_tracks(st, poses, {}, f, TrackingConfig{});
  poses[1] = standing_worker({3, 6, 0});
  st = update_tracks(st, poses, {}, 10, TrackingConfig{});
  const int new_tracks = st.next_id - 2;

  const bool ok = switches == 0 && worker_tracks.size() == 2 && min_sep > 2 * TrackingConfig{}.psi && new_tracks == 1;
  return {ok, "min separation " + fmt("%.2f m", min_sep) + ", " + std::to_string(switches) + " identity switches, " +
                  std::to_string(worker_tracks.size()) + " worker tracks over 300 frames; teleport opened " +
                  std::to_string(new_tracks) + " track"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / ("siteguard_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(base);
  std::vector<std::map<std::string, std::string>> outputs;
  for (int round = 0; round < 2; ++round) {
    const fs::path dir = base / std::to_string(round);
    fs::create_directories(dir);
    const std::string sim = (dir / "sim").string(), out = (dir / "out").string();
    const std::string cli = SITEGUARD_CLI;
    const std::vector<std::string> cmds{
        cli + " simulate --scenario mixed --seed 11 --noise-px 2 --joint-dropout 0.2 --default-occluder --out " + sim,
        cli + " run --calibration " + sim + "/calibration.json --detections " + sim + "/detections.jsonl --out " + out,
        cli + " eval --pred " + out + "/violations.jsonl --truth " + sim + "/truth.jsonl --out " + out + "/report.json",
    };
    for (const auto& c : cmds)
      if (std::system((c + " > /dev/null 2>&1").c_str()) != 0) return {false, "command failed: " + c};
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
      if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
    outputs.push_back(std::move(files));
  }
  fs::remove_all(base);
  if (outputs[0].size() != outputs[1].size()) return {false, "different file sets"};
  for (const auto& [name, text] : outputs[0])
    if (outputs[1].at(name) != text) return {false, name + " differs between runs"};
  return {true, std::to_string(outputs[0].size()) + " output files byte-identical across two runs"};
}

Outcome property_suite() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> pos(-1.0, 1.0), ang(0.0, 6.283185307179586);
  int isometry_fail = 0, monotone_fail = 0, latch_fail = 0, self_fail = 0;

  const auto observe = [](int id, const Pose3D& p) {
    WorkerObservation w;
    w.id = id;
    w.anchors = derive_semantic_joints(p);
    w.centroid = p.centroid();
    w.height = estimate_worker_height(p);
    return w;
  };

  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Pose3D> poses;
    for (int w = 0; w < 3; ++w) poses.push_back(standing_worker({0.8 * pos(rng), 0.8 * pos(rng), 0}, 1.7 + 0.1 * pos(rng)));
    std::vector<ObjectObservation> objs{
        {10, "hardhat", neck_of(poses[0]) + Eigen::Vector3d(0.1 * pos(rng), 0.1 * pos(rng), 0.12), true},
        {11, "hardhat", {pos(rng), pos(rng), 1.6}, true},
        {12, "step_ladder", {0.4 * pos(rng), 0.4 * pos(rng), 1.1}, true},
        {13, "platform", {0.4 * pos(rng), 0.4 * pos(rng), 0.1}, true},
        {14, "large_window", {0.4 * pos(rng), 0.4 * pos(rng), 1.1}, true},
    };
    const Eigen::Isometry3d iso = Eigen::Translation3d(10 * pos(rng), 10 * pos(rng), 0.0) *
                                  Eigen::AngleAxisd(ang(rng), Eigen::Vector3d::UnitZ());
    std::vector<WorkerObservation> w0, w1;
    for (std::size_t i = 0; i < poses.size(); ++i) {
      w0.push_back(observe(static_cast<int>(i), poses[i]));
      Pose3D q = poses[i];
      for (auto& j : q.joints) j.position = iso * j.position;
      w1.push_back(observe(static_cast<int>(i), q));
    }
    std::vector<ObjectObservation> o1 = objs;
    for (auto& o : o1) o.position = iso * o.position;
    for (const auto& rule : default_rules()) {
      const auto a = evaluate_rule(rule, std::span<const WorkerObservation>(w0), std::span<const ObjectObservation>(objs), 0);
      const auto b = evaluate_rule(rule, std::span<const WorkerObservation>(w1), std::span<const ObjectObservation>(o1), 0);
      if (a.size() != b.size()) ++isometry_fail;
      else
        for (std::size_t i = 0; i < a.size(); ++i)
          if (a[i].violated != b[i].violated || a[i].evidence != b[i].evidence) ++isometry_fail;
    }

    // Violation sets move monotonically with tau: attachment shrinks,
    // exclusive occupancy grows.
    ViolationRule hat = default_rules()[0], platform = default_rules()[1];
    std::optional<std::set<int>> prev_hat;
    bool prev_platform = false;
    for (double f : {0.05, 0.1, 0.2, 0.4, 0.7, 1.0}) {
      hat.tau = Threshold::fraction(f);
      platform.tau = Threshold::fraction(f);
      std::set<int> v;
      for (const auto& e : evaluate_rule(hat, std::span<const WorkerObservation>(w0), std::span<const ObjectObservation>(objs), 0))
        if (e.violated) v.insert(e.worker_track_ids.front());
      if (prev_hat && !std::includes(prev_hat->begin(), prev_hat->end(), v.begin(), v.end())) ++monotone_fail;
      prev_hat = v;
      const bool pv = evaluate_rule(platform, std::span<const WorkerObservation>(w0), std::span<const ObjectObservation>(objs), 0)[0].violated;
      if (prev_platform && !pv) ++monotone_fail;
      prev_platform = pv;
    }
  }

  // latched => violated, and ground truth scores 100 against itself, on noisy mixed runs.
  for (std::uint64_t seed : {3u, 4u}) {
    ScenarioSpec spec = scenario("mixed", seed);
    spec.noise_px = 2.0;
    spec.joint_dropout = 0.2;
    spec.view_dropout = 0.1;
    spec.occluder_walls = default_occluders("mixed");
    const auto g = generate_scene(spec);
    const auto rig = build_rig(spec.rig);
    const auto result = run_pipeline(PipelineConfig{}, rig, render_detections(g.trajectory, rig, spec));
    for (const auto& e : result.events)
      if (e.latched && !e.violated) ++latch_fail;
    const auto t = parse_label_records(serialize_truth(g.truth));
    if (evaluate(t, t).mean_accuracy_pct != 100.0) ++self_fail;
  }
  const bool ok = isometry_fail == 0 && monotone_fail == 0 && latch_fail == 0 && self_fail == 0;
  return {ok, "isometry " + std::to_string(isometry_fail) + ", monotone-tau " + std::to_string(monotone_fail) +
                  ", latched-not-violated " + std::to_string(latch_fail) + ", self-eval " + std::to_string(self_fail) +
                  " failures"};
}

}  // namespace

int main() {
  report(1, "noiseless end-to-end fidelity", noiseless_fidelity);
  report(2, "multi-view accuracy trend", multiview_trend);
  report(3, "assignment exactness", assignment_exactness);
  report(4, "geometry suite", geometry_suite);
  report(5, "violation latching", latching);
  report(6, "hardhat threshold boundary", threshold_boundary);
  report(7, "tracking stability", tracking_stability);
  report(8, "determinism", determinism);
  report(9, "property suite", property_suite);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
