#include <benchmark/benchmark.h>

#include <random>

#include "siteguard/association.hpp"
#include "siteguard/kernels.hpp"
#include "siteguard/render_detections.hpp"
#include "siteguard/rig.hpp"
#include "siteguard/scene.hpp"

using namespace siteguard;

namespace {

struct Crowd {
  std::vector<CameraParams> rig;
  FundamentalSet fmats;
  ViewIndex views;
  std::vector<Detection2D> dets;
  std::vector<CrossViewSelection> sels;

  explicit Crowd(int n) : rig(build_rig(CameraRigSpec{})), fmats(rig), views({0, 1, 2, 3}) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> x(-2.0, 2.0), y(0.0, 3.0);
    std::normal_distribution<double> noise(0.0, 2.0);
    const Eigen::Isometry3d to_world = scene_to_world(CameraRigSpec{});
    const auto detect = [&](const CameraParams& cam, const Pose3D& pose) {
      Detection2D d;
      d.camera_id = cam.id;
      for (const auto& j : pose.joints) {
        Point2D p = project(cam, j.position);
        p.u += noise(rng);
        p.v += noise(rng);
        d.keypoints.push_back(p);
      }
      return d;
    };
    for (int i = 0; i < n; ++i) {
      Pose3D pose = canonical_skeleton();
      const Eigen::Vector3d base = to_world * Eigen::Vector3d(x(rng), y(rng), 0.0);
      for (auto& j : pose.joints) j.position += base;
      CrossViewSelection s;
      s.selection_id = i;
      s.entity_class = kWorkerClass;
      for (int cam : {0, 1, 2}) s.members[cam] = detect(rig[cam], pose);
      sels.push_back(std::move(s));
      dets.push_back(detect(rig[3], pose));
    }
  }

  std::vector<const Detection2D*> det_ptrs() const {
    std::vector<const Detection2D*> out;
    for (const auto& d : dets) out.push_back(&d);
    return out;
  }
  std::vector<const CrossViewSelection*> sel_ptrs() const {
    std::vector<const CrossViewSelection*> out;
    for (const auto& s : sels) out.push_back(&s);
    return out;
  }
};

template <bool Parallel>
void BM_CostMatrix(benchmark::State& state) {
  const Crowd c(static_cast<int>(state.range(0)));
  const auto d = c.det_ptrs();
  const auto s = c.sel_ptrs();
  const AssociationConfig cfg;
  for (auto _ : state) {
    auto m = Parallel ? kernels::cost_matrix_omp(d, s, c.fmats, c.views, cfg)
                      : kernels::cost_matrix_serial(d, s, c.fmats, c.views, cfg);
    benchmark::DoNotOptimize(m.data());
  }
}

template <bool Parallel>
void BM_Triangulate(benchmark::State& state) {
  const Crowd c(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto poses = Parallel ? kernels::triangulate_workers_omp(c.sels, c.rig)
                          : kernels::triangulate_workers_serial(c.sels, c.rig);
    benchmark::DoNotOptimize(poses.data());
  }
}

template <bool Parallel>
void BM_Render(benchmark::State& state) {
  ScenarioSpec spec;
  spec.scenario = "mixed";
  spec.frames = static_cast<int>(state.range(0));
  spec.noise_px = 2.0;
  spec.joint_dropout = 0.2;
  spec.occluder_walls = default_occluders("mixed");
  const auto scene = generate_scene(spec);
  const auto rig = build_rig(spec.rig);
  for (auto _ : state) {
    auto recs = render_detections(scene.trajectory, rig, spec, Parallel ? Execution::parallel : Execution::serial);
    benchmark::DoNotOptimize(recs.data());
  }
}

}  // namespace

BENCHMARK(BM_CostMatrix<false>)->Arg(8)->Arg(32)->Arg(128);
BENCHMARK(BM_CostMatrix<true>)->Arg(8)->Arg(32)->Arg(128);
BENCHMARK(BM_Triangulate<false>)->Arg(8)->Arg(64);
BENCHMARK(BM_Triangulate<true>)->Arg(8)->Arg(64);
BENCHMARK(BM_Render<false>)->Arg(100);
BENCHMARK(BM_Render<true>)->Arg(100);
BENCHMARK_MAIN();
