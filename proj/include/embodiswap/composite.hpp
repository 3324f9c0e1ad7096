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

// Depth-aware blending of the actor-erased scene with the robot render:
// per pixel, the nearer source wins.

#pragma once

#include <cmath>
#include <optional>

#include "embodiswap/errors.hpp"
#include "embodiswap/image.hpp"
#include "embodiswap/render.hpp"

namespace embodiswap {

/// Inpainted scene frame with metric depth. The body mask, when present, is
/// carried for validation only and never affects blending.
struct SceneFrame {
  Image8 rgb;
  ImageF32 depth;  // meters; NaN or <= 0 marks invalid estimates
  std::optional<Mask8> body_mask;
};

struct CompositeFrame {
  Image8 rgb;
  Mask8 robot_mask;  // pixels where the robot won the depth test
};

/// Per-pixel rule: outside robot coverage the scene shows through; inside,
/// the robot shows iff its (bias-adjusted) depth is strictly nearer than the
/// scene's. Invalid scene depth (NaN or <= 0) is treated as infinitely far,
/// so depth-map holes never hide the robot. Exact ties keep the scene,
/// letting manipulated objects occlude the robot at contact.
///
/// depth_bias (meters, >= 0) is subtracted from the robot depth to fight
/// z-fighting on contact frames.
inline CompositeFrame blend(const SceneFrame& scene, const RgbdRender& robot,
                            double depth_bias = 0.0) {
  const int w = scene.rgb.width;
  const int h = scene.rgb.height;
  if (scene.depth.width != w || scene.depth.height != h ||
      robot.rgb.width != w || robot.rgb.height != h) {
    throw Error(Errc::DimensionMismatch,
                "scene and robot rasters must share dimensions");
  }

  CompositeFrame out;
  out.rgb = scene.rgb;
  out.robot_mask = Mask8::zeros(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!robot.coverage.at(x, y)) continue;
      const float scene_z_raw = scene.depth.at(x, y);
      const double scene_z = (std::isfinite(scene_z_raw) && scene_z_raw > 0.0f)
                                 ? scene_z_raw
                                 : std::numeric_limits<double>::infinity();
      const double robot_z = robot.depth.at(x, y) - depth_bias;
      if (robot_z < scene_z) {
        const std::uint8_t* src = robot.rgb.px(x, y);
        std::uint8_t* dst = out.rgb.px(x, y);
        dst[0] = src[0];
        dst[1] = src[1];
        dst[2] = src[2];
        out.robot_mask.set(x, y, true);
      }
    }
  }
  return out;
}

}  // namespace embodiswap
