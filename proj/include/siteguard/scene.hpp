#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "siteguard/compliance.hpp"
#include "siteguard/json_io.hpp"
#include "siteguard/rig.hpp"
#include "siteguard/rules.hpp"
#include "siteguard/skeleton.hpp"

namespace siteguard {

// Vertical rectangle blocking line of sight, in scene coordinates.
struct OccluderWall {
  Eigen::Vector2d a = Eigen::Vector2d::Zero();
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
  double z_min = 0.0;
  double z_max = 2.0;
};

struct ScenarioSpec {
  std::string scenario = "hardhat";  // hardhat | ladder | window | platform | mixed
  int frames = 300;
  int workers = 0;  // 0 selects the scenario's natural count
  std::uint64_t seed = 0;
  double noise_px = 0.0;
  double joint_dropout = 0.0;
  double view_dropout = 0.0;
  std::vector<OccluderWall> occluder_walls;
  CameraRigSpec rig;
};

void validate(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const Json& j);
Json to_json(const ScenarioSpec& spec);

// Built-in occluder for the mixed scenario: hides the platform's lower half
// from the two front cameras of the default rig.
std::vector<OccluderWall> default_occluders(const std::string& scenario);

const std::vector<std::string>& scenario_names();
int natural_worker_count(const std::string& scenario);

struct TrueWorker {
  int id = 0;
  double height = 1.8;
  Pose3D pose;  // world frame
};

struct TrueObject {
  int id = 0;
  std::string object_class;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // world frame
  double size_m = 0.3;                                 // bbox extent
};

struct FrameState {
  int frame = 0;
  std::vector<TrueWorker> workers;
  std::vector<TrueObject> objects;
};

struct TruthRecord {
  int frame = 0;
  std::string rule_id;
  std::vector<int> entity_ids;
  bool violated = false;
};

struct GeneratedScene {
  std::vector<FrameState> trajectory;
  std::vector<TruthRecord> truth;
};

// Canonical 1.80 m worker (nose-to-ankle) standing at the origin facing +y.
Pose3D canonical_skeleton(double height = 1.8);
// Point a worn hardhat occupies, relative to the worker's shoulder midpoint.
inline constexpr double kWornHatAboveNeck = 0.07;  // fraction of height

// Throws UnknownScenario / InvalidConfig.
GeneratedScene generate_scene(const ScenarioSpec& spec);

// Labels a trajectory by running the compliance engine on true geometry.
std::vector<TruthRecord> label_trajectory(const std::vector<FrameState>& trajectory,
                                          const std::vector<ViolationRule>& rules);

Json to_json(const TruthRecord& rec);
std::string serialize_truth(const std::vector<TruthRecord>& truth);

}  // namespace siteguard
