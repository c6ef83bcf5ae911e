#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "siteguard/baseline.hpp"
#include "siteguard/camera.hpp"
#include "siteguard/errors.hpp"
#include "siteguard/evaluate.hpp"
#include "siteguard/json_io.hpp"
#include "siteguard/pipeline.hpp"
#include "siteguard/render_detections.hpp"
#include "siteguard/rig.hpp"
#include "siteguard/rules.hpp"
#include "siteguard/scene.hpp"
#include "siteguard/svg_render.hpp"

namespace fs = std::filesystem;
using namespace siteguard;

namespace {

// A command-line flag mirrored by a config-file key.
struct Binding {
  std::string key;
  CLI::Option* option;
  std::function<Json()> get;
  std::function<void(const Json&)> set;
};

class Bindings {
 public:
  explicit Bindings(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* add(const std::string& key, T& var, const std::string& help) {
    std::string flag = "--" + key;
    for (auto& c : flag)
      if (c == '_') c = '-';
    CLI::Option* opt = app_->add_option(flag, var, help);
    if constexpr (!std::is_same_v<T, std::vector<int>>) opt->capture_default_str();
    items_.push_back({key, opt, [&var] { return Json(var); }, [&var](const Json& j) { var = j.get<T>(); }});
    return opt;
  }

  CLI::Option* add_flag(const std::string& key, bool& var, const std::string& help) {
    std::string flag = "--" + key;
    for (auto& c : flag)
      if (c == '_') c = '-';
    CLI::Option* opt = app_->add_flag(flag, var, help);
    items_.push_back({key, opt, [&var] { return Json(var); }, [&var](const Json& j) { var = j.get<bool>(); }});
    return opt;
  }

  // Config values win; an explicit flag that disagrees draws a warning.
  void apply(const Json& cfg, const std::set<std::string>& extra_keys = {}) {
    if (!cfg.is_object()) throw Error(ErrorCode::InvalidConfig, "config file must hold a JSON object");
    for (const auto& [key, value] : cfg.items()) {
      auto it = std::find_if(items_.begin(), items_.end(), [&](const Binding& b) { return b.key == key; });
      if (it == items_.end()) {
        if (extra_keys.count(key)) continue;
        throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
      }
      if (it->option->count() > 0 && it->get() != value)
        std::cerr << "warning: config key '" << key << "' overrides " << it->option->get_name() << "\n";
      try {
        it->set(value);
      } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, "config key '" + key + "': " + e.what());
      }
    }
  }

 private:
  CLI::App* app_;
  std::vector<Binding> items_;
};

Json load_json_file(const fs::path& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

DistanceMode parse_distance_mode(const std::string& s) {
  if (s == "geometric") return DistanceMode::geometric;
  if (s == "algebraic") return DistanceMode::algebraic;
  throw Error(ErrorCode::InvalidConfig, "distance_mode must be geometric or algebraic");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
}

struct SimulateArgs {
  std::string spec_path;
  std::string out;
  std::string scenario = "hardhat";
  int frames = 300;
  int workers = 0;
  std::uint64_t seed = 0;
  double noise_px = 0.0;
  double joint_dropout = 0.0;
  double view_dropout = 0.0;
  int rig_count = 4;
  bool default_occluder = false;
};

void run_simulate(SimulateArgs& a, Bindings& b) {
  Json extra = Json::object();
  if (!a.spec_path.empty()) {
    const Json file = load_json_file(a.spec_path);
    b.apply(file, {"occluder_walls", "rig"});
    for (const char* k : {"occluder_walls", "rig"})
      if (file.contains(k)) extra[k] = file[k];
  }
  if (a.out.empty()) throw Error(ErrorCode::InvalidConfig, "--out is required");
  Json spec_json = {{"scenario", a.scenario},           {"frames", a.frames},
                    {"workers", a.workers},             {"seed", a.seed},
                    {"noise_px", a.noise_px},           {"joint_dropout", a.joint_dropout},
                    {"view_dropout", a.view_dropout}};
  if (extra.contains("occluder_walls")) spec_json["occluder_walls"] = extra["occluder_walls"];
  spec_json["rig"] = extra.contains("rig") ? extra["rig"] : Json::object();
  if (!spec_json["rig"].contains("count")) spec_json["rig"]["count"] = a.rig_count;
  ScenarioSpec spec = scenario_from_json(spec_json);
  if (a.default_occluder)
    for (const auto& w : default_occluders(spec.scenario)) spec.occluder_walls.push_back(w);

  // Rendering uses the calibration exactly as written so the output files
  // agree with each other.
  const std::string calib = serialize_calibration(build_rig(spec.rig));
  const auto cameras = parse_calibration(calib);
  const auto scene = generate_scene(spec);
  const auto detections = render_detections(scene.trajectory, cameras, spec);

  const fs::path out(a.out);
  ensure_dir(out);
  write_text_file(out / "calibration.json", calib);
  write_text_file(out / "detections.jsonl", serialize_detections(detections));
  write_text_file(out / "truth.jsonl", serialize_truth(scene.truth));
  write_text_file(out / "rules.json", serialize_rules(default_rules()));
  write_text_file(out / "scenario.json", to_json(spec).dump(2) + "\n");
}

struct RunArgs {
  std::string config_path;
  std::string calibration;
  std::string detections;
  std::string rules;
  std::string out;
  std::vector<int> cameras;
  double phi = 0.5;
  double theta = 20.0;
  std::string distance_mode = "geometric";
  double psi = 0.5;
  int max_gap = 5;
  double nominal_height_m = kNominalHeight;
  bool serial = false;
};

void add_run_options(CLI::App* cmd, Bindings& b, RunArgs& a, bool with_tracking) {
  cmd->add_option("--config", a.config_path, "JSON config; its values win over flags");
  b.add("calibration", a.calibration, "calibration JSON");
  b.add("detections", a.detections, "detections JSONL");
  b.add("rules", a.rules, "rules JSON (default bundle when empty)");
  b.add("out", a.out, "output directory");
  b.add("phi", a.phi, "confidence threshold");
  b.add("nominal_height_m", a.nominal_height_m, "fallback worker height");
  if (with_tracking) {
    b.add("cameras", a.cameras, "camera ids to use (default: all)")->delimiter(',');
    b.add("theta", a.theta, "association threshold (pixels)");
    b.add("distance_mode", a.distance_mode, "geometric or algebraic");
    b.add("psi", a.psi, "tracking threshold (meters)");
    b.add("max_gap", a.max_gap, "frames a track survives unmatched");
    b.add_flag("serial", a.serial, "disable OpenMP kernels");
  }
}

PipelineConfig pipeline_config(RunArgs& a, Bindings& b) {
  if (!a.config_path.empty()) b.apply(load_json_file(a.config_path));
  for (const auto* p : {&a.calibration, &a.detections, &a.out})
    if (p->empty()) throw Error(ErrorCode::InvalidConfig, "--calibration, --detections and --out are required");
  PipelineConfig cfg;
  cfg.association.phi = a.phi;
  cfg.association.theta = a.theta;
  cfg.association.distance_mode = parse_distance_mode(a.distance_mode);
  cfg.tracking.psi = a.psi;
  cfg.tracking.max_gap = a.max_gap;
  cfg.nominal_height_m = a.nominal_height_m;
  cfg.cameras = a.cameras;
  cfg.execution = a.serial ? Execution::serial : Execution::parallel;
  if (!a.rules.empty()) cfg.rules = load_rules(a.rules);
  validate(cfg);
  return cfg;
}

void run_run(RunArgs& a, Bindings& b) {
  const PipelineConfig cfg = pipeline_config(a, b);
  const auto cameras = load_calibration(a.calibration);
  const auto records = parse_detections(read_text_file(a.detections));
  const PipelineResult result = run_pipeline(cfg, cameras, records);
  const fs::path out(a.out);
  ensure_dir(out);
  write_text_file(out / "violations.jsonl", serialize_violations(result.events));
  write_text_file(out / "tracks.json", tracks_dump(result).dump(1) + "\n");
  if (result.single_view_fallback) std::cerr << "note: one camera selected, used the single-view baseline\n";
}

void run_baseline(RunArgs& a, const int& camera, Bindings& b) {
  const PipelineConfig cfg = pipeline_config(a, b);
  const auto cameras = load_calibration(a.calibration);
  select_cameras(cameras, {camera});
  std::vector<DetectionRecord> own;
  for (auto& r : parse_detections(read_text_file(a.detections)))
    if (r.detection.camera_id == camera) own.push_back(std::move(r));
  const fs::path out(a.out);
  ensure_dir(out);
  write_text_file(out / "violations.jsonl", serialize_violations(run_baseline_single_view(cfg, own)));
}

void run_eval(const std::string& pred, const std::string& truth, const std::string& out) {
  const SceneReport report =
      evaluate(parse_label_records(read_text_file(pred)), parse_label_records(read_text_file(truth)));
  const std::string text = to_json(report).dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
    for (const auto& [id, r] : report.rules)
      std::cout << id << ": " << r.accuracy_pct << "% (tp " << r.tp << ", fp " << r.fp << ", tn " << r.tn << ", fn "
                << r.fn << ")\n";
    std::cout << "mean: " << report.mean_accuracy_pct << "%\n";
  }
}

void run_render(const std::string& tracks, const std::string& calibration, int camera, int frame,
                const std::string& out) {
  const Json dump = load_json_file(tracks);
  const auto cams = select_cameras(load_calibration(calibration), {camera});
  write_text_file(out, render_reprojection(dump, cams.front(), frame));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view construction safety compliance toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic scene and its detections");
  Bindings sim_b(simulate);
  simulate->add_option("--spec", sim.spec_path, "scenario spec JSON; its values win over flags");
  sim_b.add("out", sim.out, "output directory");
  sim_b.add("scenario", sim.scenario, "hardhat | ladder | window | platform | mixed");
  sim_b.add("frames", sim.frames, "frame count");
  sim_b.add("workers", sim.workers, "worker count (0 = scenario default)");
  sim_b.add("seed", sim.seed, "random seed");
  sim_b.add("noise_px", sim.noise_px, "Gaussian pixel noise sigma");
  sim_b.add("joint_dropout", sim.joint_dropout, "per-joint drop probability");
  sim_b.add("view_dropout", sim.view_dropout, "per-detection drop probability");
  sim_b.add("rig_count", sim.rig_count, "camera count");
  sim_b.add_flag("default_occluder", sim.default_occluder, "add the scenario's built-in occluder wall");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "run the multi-view pipeline");
  Bindings run_b(run_cmd);
  add_run_options(run_cmd, run_b, run, true);

  RunArgs base;
  int base_camera = 0;
  auto* base_cmd = app.add_subcommand("run-baseline", "single-view 2D baseline");
  Bindings base_b(base_cmd);
  add_run_options(base_cmd, base_b, base, false);
  base_b.add("camera", base_camera, "camera id");

  std::string pred, truth, report_out;
  auto* eval_cmd = app.add_subcommand("eval", "scene-level confusion matrix and accuracy");
  eval_cmd->add_option("--pred", pred, "violations JSONL")->required();
  eval_cmd->add_option("--truth", truth, "ground-truth JSONL")->required();
  eval_cmd->add_option("--out", report_out, "report JSON (stdout when omitted)");

  std::string r_tracks, r_calib, r_out;
  int r_camera = 0, r_frame = 0;
  auto* render_cmd = app.add_subcommand("render", "SVG re-projection of tracks");
  render_cmd->add_option("--tracks", r_tracks, "tracks dump JSON")->required();
  render_cmd->add_option("--calibration", r_calib, "calibration JSON")->required();
  render_cmd->add_option("--camera", r_camera, "camera id")->required();
  render_cmd->add_option("--frame", r_frame, "frame index")->required();
  render_cmd->add_option("--out", r_out, "SVG output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*simulate) run_simulate(sim, sim_b);
    if (*run_cmd) run_run(run, run_b);
    if (*base_cmd) run_baseline(base, base_camera, base_b);
    if (*eval_cmd) run_eval(pred, truth, report_out);
    if (*render_cmd) run_render(r_tracks, r_calib, r_camera, r_frame, r_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
