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

#include "embodiswap/composite.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace embodiswap {
namespace {

SceneFrame make_scene(int w, int h, float depth) {
  SceneFrame scene;
  scene.rgb = Image8::filled(w, h, 10, 20, 30);
  scene.depth = ImageF32::filled(w, h, depth);
  return scene;
}

RgbdRender make_robot(int w, int h) {
  RgbdRender robot;
  robot.rgb = Image8::filled(w, h, 200, 100, 50);
  robot.depth = ImageF32::filled(w, h, kNoDepth);
  robot.coverage = Mask8::zeros(w, h);
  return robot;
}

TEST(Blend, EmptyRenderIsIdentity) {
  const SceneFrame scene = make_scene(8, 8, 1.0f);
  const RgbdRender robot = make_robot(8, 8);
  const CompositeFrame out = blend(scene, robot);
  EXPECT_EQ(out.rgb.data, scene.rgb.data);
  EXPECT_EQ(out.robot_mask.count(), 0u);
}

TEST(Blend, NearerRobotWins) {
  const SceneFrame scene = make_scene(4, 4, 1.0f);
  RgbdRender robot = make_robot(4, 4);
  robot.coverage.set(1, 1, true);
  robot.depth.at(1, 1) = 0.5f;
  const CompositeFrame out = blend(scene, robot);
  EXPECT_EQ(out.rgb.px(1, 1)[0], 200);
  EXPECT_TRUE(out.robot_mask.at(1, 1));
  EXPECT_EQ(out.robot_mask.count(), 1u);
  // Other pixels untouched.
  EXPECT_EQ(out.rgb.px(0, 0)[0], 10);
}

TEST(Blend, FartherRobotIsOccluded) {
  const SceneFrame scene = make_scene(4, 4, 1.0f);
  RgbdRender robot = make_robot(4, 4);
  robot.coverage.set(2, 2, true);
  robot.depth.at(2, 2) = 1.5f;
  const CompositeFrame out = blend(scene, robot);
  EXPECT_EQ(out.rgb.px(2, 2)[0], 10);
  EXPECT_FALSE(out.robot_mask.at(2, 2));
}

TEST(Blend, ExactTieKeepsScene) {
  const SceneFrame scene = make_scene(2, 2, 1.0f);
  RgbdRender robot = make_robot(2, 2);
  robot.coverage.set(0, 0, true);
  robot.depth.at(0, 0) = 1.0f;
  const CompositeFrame out = blend(scene, robot);
  EXPECT_EQ(out.rgb.px(0, 0)[0], 10);
  EXPECT_FALSE(out.robot_mask.at(0, 0));
}

TEST(Blend, InvalidSceneDepthNeverHidesRobot) {
  for (const float bad : {std::numeric_limits<float>::quiet_NaN(), 0.0f,
                          -2.0f}) {
    const SceneFrame scene = make_scene(2, 2, bad);
    RgbdRender robot = make_robot(2, 2);
    robot.coverage.set(1, 0, true);
    robot.depth.at(1, 0) = 3.0f;  // far, but scene depth is invalid
    const CompositeFrame out = blend(scene, robot);
    EXPECT_EQ(out.rgb.px(1, 0)[0], 200);
    EXPECT_TRUE(out.robot_mask.at(1, 0));
  }
}

TEST(Blend, DepthBiasBreaksContactTies) {
  const SceneFrame scene = make_scene(2, 2, 1.0f);
  RgbdRender robot = make_robot(2, 2);
  robot.coverage.set(0, 0, true);
  robot.depth.at(0, 0) = 1.0f;
  const CompositeFrame out = blend(scene, robot, 1e-3);
  EXPECT_TRUE(out.robot_mask.at(0, 0));
}

TEST(Blend, DimensionMismatchRejected) {
  const SceneFrame scene = make_scene(4, 4, 1.0f);
  const RgbdRender robot = make_robot(4, 5);
  try {
    blend(scene, robot);
    FAIL() << "expected DimensionMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimensionMismatch);
  }
}

TEST(Blend, MaskSubsetOfCoverageAndMonotoneInDepth) {
  // Random-ish fixed pattern: robot covers a block with varying depths.
  SceneFrame scene = make_scene(8, 8, 1.0f);
  RgbdRender robot = make_robot(8, 8);
  for (int y = 2; y < 6; ++y) {
    for (int x = 2; x < 6; ++x) {
      robot.coverage.set(x, y, true);
      robot.depth.at(x, y) = 0.7f + 0.1f * ((x + y) % 5);
    }
  }
  const CompositeFrame base = blend(scene, robot);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      if (base.robot_mask.at(x, y)) EXPECT_TRUE(robot.coverage.at(x, y));
    }
  }
  // Uniformly pulling the robot closer can only grow the mask.
  RgbdRender closer = robot;
  for (float& d : closer.depth.data) {
    if (std::isfinite(d)) d -= 0.2f;
  }
  const CompositeFrame pulled = blend(scene, closer);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      if (base.robot_mask.at(x, y)) {
        EXPECT_TRUE(pulled.robot_mask.at(x, y));
      }
    }
  }
  EXPECT_GE(pulled.robot_mask.count(), base.robot_mask.count());
}

}  // namespace
}  // namespace embodiswap
