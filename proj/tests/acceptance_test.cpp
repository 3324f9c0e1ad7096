// Copyright 2026 The EmbodiSwap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance suite: one test per release criterion, each printing a
// PASS/FAIL line with its runtime. Tolerances are pinned here and nowhere
// else.

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "bundle_fixture.hpp"
#include "embodiswap/composite.hpp"
#include "embodiswap/kinematics.hpp"
#include "embodiswap/labels.hpp"
#include "embodiswap/pipeline.hpp"
#include "embodiswap/render.hpp"
#include "embodiswap/retarget.hpp"
#include "embodiswap/urdf.hpp"
#include "fixtures.hpp"
#include "oracle_raytrace.hpp"
#include "test_util.hpp"

namespace embodiswap {
namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

/// Prints the criterion verdict when the test scope closes.
class Criterion {
 public:
  Criterion(int number, const char* name, double budget_seconds)
      : number_(number),
        name_(name),
        budget_(budget_seconds),
        start_(std::chrono::steady_clock::now()) {}

  ~Criterion() {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_)
            .count();
    EXPECT_LT(elapsed, budget_) << "criterion " << number_
                                << " exceeded its runtime budget";
    const bool failed = ::testing::Test::HasFailure();
    std::printf("[ACCEPTANCE] criterion %d (%s): %s (%.2fs)\n", number_,
                name_, failed ? "FAIL" : "PASS", elapsed);
    std::fflush(stdout);
  }

 private:
  int number_;
  const char* name_;
  double budget_;
  std::chrono::steady_clock::time_point start_;
};

TEST(Acceptance, Criterion1RetargetingCorrectness) {
  Criterion crit(1, "retargeting correctness", 5.0);

  const HandKeypoints fixture = testing::fixture_hand();
  const Vec3 center = gripper_center(fixture);
  EXPECT_NEAR(center.x, 0.052, 1e-3);
  EXPECT_NEAR(center.y, 0.026, 1e-3);
  EXPECT_NEAR(center.z, 0.0, 1e-3);

  const SE3 pose = retarget_pose(fixture);
  const Vec3 z_col = pose.rotation.col(2);
  EXPECT_NEAR(z_col.x, 0.0, 1e-3);
  EXPECT_NEAR(z_col.y, 0.0, 1e-3);
  EXPECT_NEAR(z_col.z, 1.0, 1e-3);
  const Vec3 y_col = pose.rotation.col(1);
  EXPECT_NEAR(y_col.x, -0.447, 1e-3);
  EXPECT_NEAR(y_col.y, 0.894, 1e-3);
  EXPECT_NEAR(y_col.z, 0.0, 1e-3);

  std::mt19937 rng(1001);
  for (int i = 0; i < 10000; ++i) {
    const HandSide side = (i % 2 == 0) ? HandSide::Right : HandSide::Left;
    const SE3 p = retarget_pose(testing::random_hand(rng, side));
    ASSERT_LE(p.rotation.orthonormality_error(), 1e-6);
    ASSERT_NEAR(p.rotation.det(), 1.0, 1e-6);
  }
}

TEST(Acceptance, Criterion2RetargetingEquivariance) {
  Criterion crit(2, "retargeting equivariance", 5.0);
  std::mt19937 rng(1002);
  for (int i = 0; i < 1000; ++i) {
    const HandKeypoints kp = testing::random_hand(
        rng, (i % 2 == 0) ? HandSide::Right : HandSide::Left);
    const SE3 motion = testing::random_se3(rng);
    HandKeypoints moved = kp;
    for (Vec3& p : moved.points) p = motion * p;
    ASSERT_LT(testing::max_abs_diff(retarget_pose(moved),
                                    motion * retarget_pose(kp)),
              1e-9);
  }
}

TEST(Acceptance, Criterion3JacobianVsFiniteDifferences) {
  Criterion crit(3, "jacobian vs finite differences", 30.0);
  std::mt19937 rng(1003);
  std::uniform_int_distribution<int> n_joints(1, 8);
  for (int chain = 0; chain < 100; ++chain) {
    KinematicModel model =
        parse_urdf(testing::random_chain_urdf(rng, n_joints(rng)));
    model.end_effector_link =
        model.link_index("link" + std::to_string(model.joints.size()));
    for (int cfg_i = 0; cfg_i < 10; ++cfg_i) {
      JointConfig q;
      for (const int j : model.actuated_joints) {
        const JointLimits& lim = model.joints[j].limits;
        std::uniform_real_distribution<double> u(lim.lower, lim.upper);
        q.push_back(u(rng));
      }
      const Jacobian analytic = ee_jacobian(model, q);
      const double h = 1e-6;
      for (size_t col = 0; col < model.dof(); ++col) {
        JointConfig hi = q, lo = q;
        hi[col] += h;
        lo[col] -= h;
        const SE3 p_hi =
            forward_kinematics(model, hi)[model.end_effector_link];
        const SE3 p_lo =
            forward_kinematics(model, lo)[model.end_effector_link];
        const Vec3 lin = (p_hi.translation - p_lo.translation) / (2 * h);
        const Vec3 ang =
            (p_hi.rotation * p_lo.rotation.transpose()).to_axis_angle() /
            (2 * h);
        const int c = static_cast<int>(col);
        ASSERT_LE(std::abs(analytic.at(0, c) - lin.x), 1e-5);
        ASSERT_LE(std::abs(analytic.at(1, c) - lin.y), 1e-5);
        ASSERT_LE(std::abs(analytic.at(2, c) - lin.z), 1e-5);
        ASSERT_LE(std::abs(analytic.at(3, c) - ang.x), 1e-5);
        ASSERT_LE(std::abs(analytic.at(4, c) - ang.y), 1e-5);
        ASSERT_LE(std::abs(analytic.at(5, c) - ang.z), 1e-5);
      }
    }
  }
}

TEST(Acceptance, Criterion4IkRoundTrip) {
  Criterion crit(4, "ik round trip", 60.0);
  KinematicModel model = parse_urdf(testing::six_dof_urdf());
  model.set_end_effector("gripper_link");
  std::mt19937 rng(1004);
  std::uniform_real_distribution<double> perturb(-0.2, 0.2);

  const int kTrials = 200;
  int converged = 0;
  for (int i = 0; i < kTrials; ++i) {
    JointConfig q_true;
    for (const int j : model.actuated_joints) {
      const JointLimits& lim = model.joints[j].limits;
      std::uniform_real_distribution<double> u(lim.lower, lim.upper);
      q_true.push_back(u(rng));
    }
    const SE3 target = forward_kinematics(model, q_true)[model.end_effector_link];
    JointConfig seed = q_true;
    for (double& v : seed) v += perturb(rng);
    clamp_to_limits(model, seed);

    const IkResult result = solve_ik(model, target, seed, IkParams{});
    ASSERT_TRUE(within_limits(model, result.config))
        << "joint limits violated on trial " << i;
    if (result.converged && result.residual_pos <= 1e-3 &&
        result.residual_rot <= 1e-2) {
      ++converged;
    }
  }
  EXPECT_GE(converged, static_cast<int>(0.95 * kTrials))
      << converged << "/" << kTrials << " converged";
}

TEST(Acceptance, Criterion5RasterizerOracleEquivalence) {
  Criterion crit(5, "rasterizer vs ray oracle", 60.0);
  std::mt19937 rng(1005);
  const CameraIntrinsics k{48, 48, 32, 32, 64, 64};
  std::uniform_int_distribution<int> tri_count(5, 50);
  for (int scene_i = 0; scene_i < 20; ++scene_i) {
    const auto mesh = testing::random_triangle_soup(rng, tri_count(rng));
    RenderScene scene;
    scene.intrinsics = k;
    scene.instances.push_back({mesh, SE3::identity()});
    const RgbdRender render = rasterize(scene);
    const auto cmp = testing::compare_with_ray_oracle(*mesh, k, render);
    EXPECT_EQ(cmp.coverage_mismatches, 0) << "scene " << scene_i;
    EXPECT_LE(cmp.max_depth_error, 1e-4) << "scene " << scene_i;
  }
}

TEST(Acceptance, Criterion6BlendRuleTruthTable) {
  Criterion crit(6, "blend rule truth table", 1.0);
  // coverage x robot-depth relation x scene-depth validity, exhaustively.
  const float scene_valid = 1.0f;
  const float scene_nan = std::numeric_limits<float>::quiet_NaN();
  struct Case {
    bool coverage;
    double robot_depth;  // relative to the valid scene depth of 1.0
    bool scene_is_nan;
    bool robot_should_win;
  };
  const Case cases[] = {
      {false, 0.5, false, false}, {false, 1.5, false, false},
      {false, 1.0, false, false}, {false, 0.5, true, false},
      {false, 1.5, true, false},  {false, 1.0, true, false},
      {true, 0.5, false, true},   // nearer
      {true, 1.5, false, false},  // farther
      {true, 1.0, false, false},  // exact tie: scene wins
      {true, 0.5, true, true},    // NaN scene: robot wins
      {true, 1.5, true, true},    {true, 1.0, true, true},
  };
  for (const Case& c : cases) {
    SceneFrame scene;
    scene.rgb = Image8::filled(1, 1, 10, 20, 30);
    scene.depth = ImageF32::filled(1, 1, c.scene_is_nan ? scene_nan
                                                        : scene_valid);
    RgbdRender robot;
    robot.rgb = Image8::filled(1, 1, 200, 100, 50);
    robot.depth = ImageF32::filled(1, 1, c.coverage
                                             ? static_cast<float>(c.robot_depth)
                                             : kNoDepth);
    robot.coverage = Mask8::zeros(1, 1);
    robot.coverage.set(0, 0, c.coverage);

    const CompositeFrame out = blend(scene, robot);
    EXPECT_EQ(out.robot_mask.at(0, 0), c.robot_should_win)
        << "coverage=" << c.coverage << " robot_depth=" << c.robot_depth
        << " scene_nan=" << c.scene_is_nan;
    EXPECT_EQ(out.rgb.px(0, 0)[0], c.robot_should_win ? 200 : 10);
  }
}

TEST(Acceptance, Criterion7LabelAlgebra) {
  Criterion crit(7, "label algebra", 10.0);
  std::mt19937 rng(1007);
  LookaheadPolicy k2;
  k2.per_action["x"] = 2;
  LookaheadPolicy k4;
  k4.per_action["x"] = 4;

  auto as_se3 = [](const RelPoseLabel& label) {
    return SE3{Rot3::from_axis_angle(label.rotation), label.translation};
  };

  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<TrajectoryFrame> traj(9);
    for (int i = 0; i < 9; ++i) {
      traj[i].index = i;
      traj[i].gripper_pose_cam = testing::random_se3(rng);
      traj[i].world_from_camera = testing::random_se3(rng);
    }
    // Composition law: T(t -> t+4) = T(t -> t+2) * T(t+2 -> t+4).
    const auto short_labels = label_clip(traj, "x", k2);
    const auto long_labels = label_clip(traj, "x", k4);
    for (size_t t = 0; t + 4 < traj.size(); ++t) {
      ASSERT_LT(testing::max_abs_diff(
                    as_se3(short_labels[t]) * as_se3(short_labels[t + 2]),
                    as_se3(long_labels[t])),
                1e-9);
    }
    // Camera-motion invariance: re-express the same world-frame hand
    // through arbitrary per-frame camera poses.
    auto perturbed = traj;
    for (auto& f : perturbed) {
      const SE3 world_hand = to_world(f);
      const SE3 new_cam = testing::random_se3(rng);
      f.world_from_camera = new_cam;
      f.gripper_pose_cam = new_cam.inverse() * world_hand;
    }
    const auto moved = label_clip(perturbed, "x", k2);
    ASSERT_EQ(moved.size(), short_labels.size());
    for (size_t i = 0; i < moved.size(); ++i) {
      ASSERT_LT((moved[i].translation - short_labels[i].translation).norm(),
                1e-9);
      ASSERT_LT((moved[i].rotation - short_labels[i].rotation).norm(), 1e-9);
    }
  }
}

TEST(Acceptance, Criterion8EndToEndGoldenRun) {
  Criterion crit(8, "end-to-end golden run", 10.0);
  const fs::path root = testing::scratch_dir("es_acceptance_golden");
  testing::write_fixture_bundle(root / "clip");
  const PipelineConfig cfg =
      PipelineConfig::from_file(testing::write_fixture_config(root));

  auto snapshot = [&] {
    std::map<std::string, std::string> files;
    for (const auto& entry :
         fs::recursive_directory_iterator(cfg.output_dir)) {
      if (entry.is_regular_file()) {
        files[fs::relative(entry.path(), cfg.output_dir).string()] =
            detail::read_file(entry.path());
      }
    }
    return files;
  };

  const DatasetManifest first = run(cfg, {root / "clip"});
  ASSERT_EQ(first.clips.size(), 1u);
  EXPECT_FALSE(first.clips[0].failed);
  EXPECT_EQ(first.clips[0].frames_emitted, 3);
  EXPECT_EQ(first.clips[0].labels_emitted, 2);
  EXPECT_TRUE(first.clips[0].counts_reconcile());
  const auto run1 = snapshot();
  ASSERT_GE(run1.size(), 5u);  // 3 composites + labels + manifest

  const DatasetManifest second = run(cfg, {root / "clip"});
  EXPECT_TRUE(second.clips[0].counts_reconcile());
  const auto run2 = snapshot();

  ASSERT_EQ(run1.size(), run2.size());
  for (const auto& [name, bytes] : run1) {
    ASSERT_TRUE(run2.count(name)) << name;
    EXPECT_EQ(bytes, run2.at(name)) << name << " differs between runs";
  }
  fs::remove_all(root);
}

TEST(Acceptance, Criterion9UrdfConformance) {
  Criterion crit(9, "urdf conformance", 5.0);

  // 1. Minimal: one link, no joints.
  const KinematicModel minimal = parse_urdf(testing::minimal_urdf());
  EXPECT_EQ(minimal.links.size(), 1u);
  EXPECT_EQ(minimal.dof(), 0u);

  // 2. Two-link planar arm.
  const KinematicModel planar = parse_urdf(testing::planar2_urdf());
  EXPECT_EQ(planar.dof(), 2u);
  EXPECT_EQ(planar.joints[0].type, JointType::Revolute);
  EXPECT_NEAR(planar.joints[1].origin.translation.x, 0.5, 1e-12);

  // 3. Six-DOF arm with mesh visuals.
  const KinematicModel six = parse_urdf(testing::six_dof_urdf());
  EXPECT_EQ(six.dof(), 6u);
  bool has_mesh_visual = false;
  for (const Link& link : six.links) {
    for (const VisualGeometry& vg : link.visuals) {
      if (vg.kind == VisualGeometry::Kind::Mesh) has_mesh_visual = true;
    }
  }
  EXPECT_TRUE(has_mesh_visual);

  // 4. Prismatic joint.
  const KinematicModel slider = parse_urdf(testing::prismatic_urdf());
  EXPECT_EQ(slider.joints[0].type, JointType::Prismatic);
  EXPECT_NEAR(slider.joints[0].limits.upper, 0.5, 1e-12);

  // 5. Continuous joint maps to revolute with [-2pi, 2pi].
  const KinematicModel spinner = parse_urdf(testing::continuous_urdf());
  EXPECT_EQ(spinner.joints[0].type, JointType::Revolute);
  EXPECT_NEAR(spinner.joints[0].limits.lower, -2 * kPi, 1e-12);
  EXPECT_NEAR(spinner.joints[0].limits.upper, 2 * kPi, 1e-12);

  // 6. Cyclic graph rejected.
  auto code_of = [](const std::string& text) {
    try {
      parse_urdf(text);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::IoError;  // sentinel: parse unexpectedly succeeded
  };
  EXPECT_EQ(code_of(testing::cyclic_urdf()), Errc::CyclicKinematics);

  // 7. Joint referencing an undefined link rejected.
  EXPECT_EQ(code_of(R"(<robot><link name="a"/>
    <joint name="j" type="fixed"><parent link="a"/><child link="ghost"/></joint>
    </robot>)"),
            Errc::MissingLink);

  // 8. Unsupported joint type rejected.
  EXPECT_EQ(code_of(R"(<robot><link name="a"/><link name="b"/>
    <joint name="j" type="floating"><parent link="a"/><child link="b"/></joint>
    </robot>)"),
            Errc::UnsupportedJointType);

  // 9. Malformed XML rejected.
  EXPECT_EQ(code_of("<robot><link name='a'>"), Errc::MalformedXml);
}

}  // namespace
}  // namespace embodiswap
