#include <doctest.h>

#include <random>

#include "siteguard/kernels.hpp"
#include "siteguard/render_detections.hpp"
#include "support.hpp"

using namespace siteguard;
using namespace testing;

namespace {

std::vector<Pose3D> crowd(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> x(-1.5, 1.5), y(0.2, 2.5);
  std::vector<Pose3D> out;
  for (int i = 0; i < n; ++i) out.push_back(standing_worker(scene_point(CameraRigSpec{}, x(rng), y(rng), 0.0)));
  return out;
}

void jitter(Detection2D& d, std::mt19937_64& rng, double sigma, double drop) {
  std::normal_distribution<double> n(0.0, sigma);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& k : d.keypoints) {
    if (u(rng) < drop) {
      k = Point2D::absent();
      continue;
    }
    k.u += n(rng);
    k.v += n(rng);
  }
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("cost matrix: OpenMP equals the serial reference bit for bit") {
    const auto rig = default_rig();
    const FundamentalSet fm(rig);
    const ViewIndex views({0, 1, 2, 3});
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 10; ++trial) {
      const auto poses = crowd(rng, 6);
      std::vector<CrossViewSelection> sels;
      std::vector<Detection2D> dets;
      for (std::size_t i = 0; i < poses.size(); ++i) {
        CrossViewSelection s;
        s.selection_id = static_cast<int>(i);
        s.entity_class = kWorkerClass;
        for (int cam : {0, 1}) {
          Detection2D d = detect_worker(rig[cam], poses[i]);
          jitter(d, rng, 2.0, 0.2);
          s.members[cam] = d;
        }
        sels.push_back(s);
        Detection2D d = detect_worker(rig[2], poses[(i + trial) % poses.size()]);
        jitter(d, rng, 2.0, 0.2);
        dets.push_back(d);
      }
      std::vector<const Detection2D*> dp;
      std::vector<const CrossViewSelection*> sp;
      for (const auto& d : dets) dp.push_back(&d);
      for (const auto& s : sels) sp.push_back(&s);
      for (auto mode : {DistanceMode::geometric, DistanceMode::algebraic}) {
        AssociationConfig cfg;
        cfg.distance_mode = mode;
        const Eigen::MatrixXd a = kernels::cost_matrix_serial(dp, sp, fm, views, cfg);
        const Eigen::MatrixXd b = kernels::cost_matrix_omp(dp, sp, fm, views, cfg);
        REQUIRE(a.rows() == 6);
        REQUIRE(a.cols() == 6);
        CHECK(std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0);
        for (int r = 0; r < a.rows(); ++r)
          for (int c = 0; c < a.cols(); ++c)
            CHECK(a(r, c) == selection_cost(*dp[r], *sp[c], fm, views, cfg));
      }
    }
  }

  TEST_CASE("worker triangulation: OpenMP equals the serial reference") {
    const auto rig = default_rig();
    std::mt19937_64 rng(52);
    const auto poses = crowd(rng, 12);
    std::vector<CrossViewSelection> sels;
    for (std::size_t i = 0; i < poses.size(); ++i) {
      CrossViewSelection s;
      s.entity_class = kWorkerClass;
      for (const auto& cam : rig) {
        Detection2D d = detect_worker(cam, poses[i]);
        jitter(d, rng, 1.0, 0.3);
        s.members[cam.id] = d;
      }
      sels.push_back(s);
    }
    // A selection that cannot be triangulated.
    CrossViewSelection lonely;
    lonely.entity_class = kWorkerClass;
    lonely.members[0] = detect_worker(rig[0], poses[0]);
    sels.push_back(lonely);

    const auto a = kernels::triangulate_workers_serial(sels, rig);
    const auto b = kernels::triangulate_workers_omp(sels, rig);
    REQUIRE(a.size() == sels.size());
    REQUIRE(b.size() == sels.size());
    CHECK_FALSE(a.back());
    CHECK_FALSE(b.back());
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
      REQUIRE(a[i]);
      REQUIRE(b[i]);
      for (std::size_t j = 0; j < kNumJoints; ++j) {
        CHECK(a[i]->joints[j].present == b[i]->joints[j].present);
        if (a[i]->joints[j].present) CHECK(a[i]->joints[j].position == b[i]->joints[j].position);
      }
    }
  }

  TEST_CASE("association: parallel and serial execution agree") {
    const auto rig = default_rig();
    const FundamentalSet fm(rig);
    const ViewIndex views({0, 1, 2, 3});
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 10; ++trial) {
      const auto poses = crowd(rng, 5);
      std::vector<std::vector<Detection2D>> frames(4);
      for (std::size_t v = 0; v < 4; ++v)
        for (const auto& p : poses) {
          Detection2D d = detect_worker(rig[v], p);
          jitter(d, rng, 3.0, 0.2);
          frames[v].push_back(d);
        }
      const auto a = associate_frame(frames, fm, views, AssociationConfig{}, Execution::serial);
      const auto b = associate_frame(frames, fm, views, AssociationConfig{}, Execution::parallel);
      REQUIRE(a.workers.size() == b.workers.size());
      for (std::size_t i = 0; i < a.workers.size(); ++i) {
        CHECK(a.workers[i].selection_id == b.workers[i].selection_id);
        REQUIRE(a.workers[i].members.size() == b.workers[i].members.size());
        for (const auto& [cam, d] : a.workers[i].members) {
          REQUIRE(b.workers[i].members.count(cam) == 1);
          CHECK(d.keypoints[0].u == b.workers[i].members.at(cam).keypoints[0].u);
        }
      }
    }
  }

  TEST_CASE("rendering: parallel frames equal the serial loop") {
    ScenarioSpec spec;
    spec.scenario = "platform";
    spec.frames = 50;
    spec.seed = 99;
    spec.noise_px = 3.0;
    spec.joint_dropout = 0.1;
    spec.view_dropout = 0.05;
    const auto g = generate_scene(spec);
    const auto rig = build_rig(spec.rig);
    CHECK(serialize_detections(render_detections(g.trajectory, rig, spec, Execution::serial)) ==
          serialize_detections(render_detections(g.trajectory, rig, spec, Execution::parallel)));
  }
}
