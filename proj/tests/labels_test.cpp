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

#include "embodiswap/labels.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

namespace embodiswap {
namespace {

using testing::max_abs_diff;
using testing::random_se3;

std::vector<TrajectoryFrame> random_trajectory(std::mt19937& rng, int frames) {
  std::vector<TrajectoryFrame> traj(frames);
  for (int i = 0; i < frames; ++i) {
    traj[i].index = i;
    traj[i].gripper_pose_cam = random_se3(rng);
    traj[i].world_from_camera = random_se3(rng);
    traj[i].timestamp = i / 30.0;
  }
  return traj;
}

SE3 label_as_se3(const RelPoseLabel& label) {
  return {Rot3::from_axis_angle(label.rotation), label.translation};
}

TEST(ToWorld, IdentityCameraPassesThrough) {
  std::mt19937 rng(51);
  TrajectoryFrame f;
  f.gripper_pose_cam = random_se3(rng);
  EXPECT_LT(max_abs_diff(to_world(f), f.gripper_pose_cam), 1e-15);
}

TEST(ToWorld, PureCameraTranslationShiftsPose) {
  std::mt19937 rng(52);
  TrajectoryFrame f;
  f.gripper_pose_cam = random_se3(rng);
  f.world_from_camera = {Rot3::identity(), {0.3, -0.1, 2.0}};
  const SE3 w = to_world(f);
  EXPECT_LT(max_abs_diff(w.rotation, f.gripper_pose_cam.rotation), 1e-15);
  const Vec3 expected = f.gripper_pose_cam.translation + Vec3{0.3, -0.1, 2.0};
  EXPECT_LT((w.translation - expected).norm(), 1e-15);
}

TEST(ToWorld, AlgebraicRoundTrip) {
  std::mt19937 rng(53);
  for (int i = 0; i < 200; ++i) {
    TrajectoryFrame f;
    f.gripper_pose_cam = random_se3(rng);
    f.world_from_camera = random_se3(rng);
    const SE3 recovered = f.world_from_camera.inverse() * to_world(f);
    EXPECT_LT(max_abs_diff(recovered, f.gripper_pose_cam), 1e-9);
  }
}

TEST(MakeLabel, StaticHandGivesZeroLabel) {
  std::mt19937 rng(54);
  const SE3 pose = random_se3(rng);
  std::vector<TrajectoryFrame> traj(5);
  for (int i = 0; i < 5; ++i) {
    traj[i].index = i;
    traj[i].gripper_pose_cam = pose;
  }
  const RelPoseLabel label = make_label(traj, 0, 3);
  EXPECT_LT(label.translation.norm(), 1e-12);
  EXPECT_LT(label.rotation.norm(), 1e-12);
}

// Hand moves +0.1 m along world x; gripper rotation is identity at frame t,
// so the gripper-frame label equals the world delta.
TEST(MakeLabel, PureTranslationStep) {
  std::vector<TrajectoryFrame> traj(2);
  traj[0].index = 0;
  traj[1].index = 1;
  traj[1].gripper_pose_cam.translation = {0.1, 0.0, 0.0};
  const RelPoseLabel label = make_label(traj, 0, 1);
  EXPECT_NEAR(label.translation.x, 0.1, 1e-12);
  EXPECT_NEAR(label.translation.y, 0.0, 1e-12);
  EXPECT_LT(label.rotation.norm(), 1e-12);
}

TEST(MakeLabel, CameraMotionWithStaticWorldHandIsZero) {
  std::mt19937 rng(55);
  const SE3 world_hand = random_se3(rng);
  std::vector<TrajectoryFrame> traj(4);
  for (int i = 0; i < 4; ++i) {
    traj[i].index = i;
    traj[i].world_from_camera = random_se3(rng);  // moving camera
    traj[i].gripper_pose_cam = traj[i].world_from_camera.inverse() * world_hand;
  }
  const RelPoseLabel label = make_label(traj, 0, 3);
  EXPECT_LT(label.translation.norm(), 1e-9);
  EXPECT_LT(label.rotation.norm(), 1e-9);
}

TEST(MakeLabel, LookaheadPastClipEndThrows) {
  std::mt19937 rng(56);
  const auto traj = random_trajectory(rng, 3);
  try {
    make_label(traj, 1, 2);
    FAIL() << "expected LookaheadOutOfRange";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::LookaheadOutOfRange);
  }
}

TEST(LabelClip, CountsAndIndices) {
  std::mt19937 rng(57);
  const auto traj = random_trajectory(rng, 10);
  LookaheadPolicy policy;
  policy.per_action["open"] = 3;
  const auto labels = label_clip(traj, "open", policy);
  ASSERT_EQ(labels.size(), 7u);
  for (int i = 0; i < 7; ++i) {
    EXPECT_EQ(labels[i].frame_index, i);
    EXPECT_EQ(labels[i].lookahead_k, 3);
  }
}

TEST(LabelClip, ShortClipYieldsNoLabels) {
  std::mt19937 rng(58);
  const auto traj = random_trajectory(rng, 3);
  LookaheadPolicy policy;
  policy.per_action["pour"] = 8;
  EXPECT_TRUE(label_clip(traj, "pour", policy).empty());
}

TEST(LabelClip, UnknownActionThrows) {
  std::mt19937 rng(59);
  const auto traj = random_trajectory(rng, 10);
  try {
    label_clip(traj, "juggle", LookaheadPolicy::defaults());
    FAIL() << "expected UnknownActionClass";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownActionClass);
  }
}

TEST(LabelClip, ExcludedFramesDropTouchingLabels) {
  std::mt19937 rng(60);
  const auto traj = random_trajectory(rng, 10);
  LookaheadPolicy policy;
  policy.per_action["cut"] = 2;
  const auto labels = label_clip(traj, "cut", policy, {4});
  // Labels at t=2 (pairs 4) and t=4 (anchored at 4) are gone: 8 - 2 = 6.
  EXPECT_EQ(labels.size(), 6u);
  for (const auto& label : labels) {
    EXPECT_NE(label.frame_index, 4);
    EXPECT_NE(label.frame_index, 2);
  }
}

TEST(LabelClip, ChainCompositionLaw) {
  std::mt19937 rng(61);
  LookaheadPolicy policy;
  policy.per_action["x"] = 2;
  LookaheadPolicy policy2;
  policy2.per_action["x"] = 4;
  for (int trial = 0; trial < 200; ++trial) {
    const auto traj = random_trajectory(rng, 9);
    const auto short_labels = label_clip(traj, "x", policy);
    const auto long_labels = label_clip(traj, "x", policy2);
    // T(t -> t+4) == T(t -> t+2) * T(t+2 -> t+4)
    for (size_t t = 0; t + 4 < traj.size(); ++t) {
      const SE3 chained =
          label_as_se3(short_labels[t]) * label_as_se3(short_labels[t + 2]);
      EXPECT_LT(max_abs_diff(chained, label_as_se3(long_labels[t])), 1e-9);
    }
  }
}

TEST(LabelClip, CameraMotionInvariance) {
  std::mt19937 rng(62);
  LookaheadPolicy policy;
  policy.per_action["x"] = 3;
  for (int trial = 0; trial < 100; ++trial) {
    auto traj = random_trajectory(rng, 8);
    const auto base = label_clip(traj, "x", policy);
    // Perturb every camera pose; keep the world-frame hand identical.
    auto perturbed = traj;
    for (auto& f : perturbed) {
      const SE3 world_hand = to_world(f);
      const SE3 new_cam = random_se3(rng);
      f.world_from_camera = new_cam;
      f.gripper_pose_cam = new_cam.inverse() * world_hand;
    }
    const auto moved = label_clip(perturbed, "x", policy);
    ASSERT_EQ(base.size(), moved.size());
    for (size_t i = 0; i < base.size(); ++i) {
      EXPECT_LT((base[i].translation - moved[i].translation).norm(), 1e-9);
      EXPECT_LT((base[i].rotation - moved[i].rotation).norm(), 1e-9);
    }
  }
}

TEST(LookaheadPolicyDefaults, RapidShortSlowLong) {
  const LookaheadPolicy policy = LookaheadPolicy::defaults();
  EXPECT_TRUE(policy.is_valid());
  EXPECT_LT(policy.lookahead_for("open"), policy.lookahead_for("pour"));
  EXPECT_EQ(policy.lookahead_for("close"), 8);
  EXPECT_EQ(policy.lookahead_for("place"), 16);
}

}  // namespace
}  // namespace embodiswap
