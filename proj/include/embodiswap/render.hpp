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

// Software rasterizer producing the synthetic robot's RGB-D render.
//
// Sampling is at pixel centers with the top-left fill convention for edge
// ties, perspective-correct interpolation (1/z linear in screen space), and
// a z-buffer keyed on camera-space depth. Triangles crossing the near plane
// are clipped against it before projection. Rendering is deterministic:
// identical scenes produce bit-identical output.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "embodiswap/errors.hpp"
#include "embodiswap/geometry.hpp"
#include "embodiswap/image.hpp"
#include "embodiswap/mesh.hpp"

namespace embodiswap {

struct LightParams {
  Vec3 direction{0, 0, 1};  // direction light travels, camera frame
  double ambient = 0.35;
  double diffuse = 0.65;
};

struct MeshInstance {
  std::shared_ptr<const Mesh> mesh;
  SE3 pose;  // mesh frame -> camera frame
};

struct RenderScene {
  std::vector<MeshInstance> instances;
  CameraIntrinsics intrinsics;
  LightParams light;
  double near_plane = 0.01;  // meters; no far plane
};

/// RGB render + depth map + coverage mask. depth is +inf exactly where
/// coverage is unset; finite depths are positive camera-space z.
struct RgbdRender {
  Image8 rgb;
  ImageF32 depth;
  Mask8 coverage;
};

namespace detail {

struct ShadedVertex {
  Vec3 position;  // camera frame
  Vec3 normal;    // camera frame, unit before interpolation
};

/// Clips a camera-space triangle against z = near. Returns 0, 1, or 2
/// triangles written into `out`.
inline int clip_near(const ShadedVertex in[3], double near,
                     ShadedVertex out[2][3]) {
  ShadedVertex poly[4];
  int count = 0;
  for (int i = 0; i < 3; ++i) {
    const ShadedVertex& a = in[i];
    const ShadedVertex& b = in[(i + 1) % 3];
    const bool a_in = a.position.z >= near;
    const bool b_in = b.position.z >= near;
    if (a_in) poly[count++] = a;
    if (a_in != b_in) {
      const double t =
          (near - a.position.z) / (b.position.z - a.position.z);
      ShadedVertex mid;
      mid.position = a.position + (b.position - a.position) * t;
      mid.position.z = near;  // exact on the plane
      mid.normal = a.normal + (b.normal - a.normal) * t;
      poly[count++] = mid;
    }
  }
  if (count < 3) return 0;
  out[0][0] = poly[0];
  out[0][1] = poly[1];
  out[0][2] = poly[2];
  if (count == 3) return 1;
  out[1][0] = poly[0];
  out[1][1] = poly[2];
  out[1][2] = poly[3];
  return 2;
}

inline double edge_function(const Vec2& a, const Vec2& b, double px,
                            double py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

/// Top-left rule for the raster convention used here (+y down, positive
/// interior): zero-valued edges count only when horizontal-going-right
/// (top) or going-up (left).
inline bool edge_tie_accepts(const Vec2& a, const Vec2& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return dy < 0.0 || (dy == 0.0 && dx > 0.0);
}

}  // namespace detail

inline RgbdRender rasterize(const RenderScene& scene) {
  const CameraIntrinsics& k = scene.intrinsics;
  if (!k.is_valid()) {
    throw Error(Errc::ConfigInvalid, "invalid camera intrinsics");
  }
  if (scene.light.ambient + scene.light.diffuse > 1.2 ||
      scene.light.ambient < 0.0 || scene.light.diffuse < 0.0) {
    throw Error(Errc::ConfigInvalid,
                "light ambient + diffuse must lie in [0, 1.2]");
  }
  const Vec3 light_dir = scene.light.direction.norm() > 1e-12
                             ? normalized(scene.light.direction)
                             : Vec3{0, 0, 1};

  RgbdRender out;
  out.rgb = Image8::filled(k.width, k.height, 0, 0, 0);
  out.depth = ImageF32::filled(k.width, k.height, kNoDepth);
  out.coverage = Mask8::zeros(k.width, k.height);

  for (const MeshInstance& inst : scene.instances) {
    if (!inst.mesh || inst.mesh->vertices.empty()) continue;
    const Mesh& mesh = *inst.mesh;

    // Transform once per instance.
    std::vector<detail::ShadedVertex> cam(mesh.vertices.size());
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
      cam[i].position = inst.pose * mesh.vertices[i];
      cam[i].normal = inst.pose.rotation * mesh.normals[i];
    }

    for (const auto& tri : mesh.triangles) {
      const detail::ShadedVertex corners[3] = {cam[tri[0]], cam[tri[1]],
                                               cam[tri[2]]};
      detail::ShadedVertex clipped[2][3];
      const int n_clipped =
          detail::clip_near(corners, scene.near_plane, clipped);

      for (int c = 0; c < n_clipped; ++c) {
        detail::ShadedVertex* v = clipped[c];
        Vec2 p[3];
        double z[3];
        for (int i = 0; i < 3; ++i) {
          const PixelSample s = project(k, v[i].position);
          p[i] = s.px;
          z[i] = s.depth;
        }
        double area = detail::edge_function(p[0], p[1], p[2].x, p[2].y);
        if (area == 0.0) continue;  // degenerate in screen space
        if (area < 0.0) {
          std::swap(v[1], v[2]);
          std::swap(p[1], p[2]);
          std::swap(z[1], z[2]);
          area = -area;
        }

        const int x0 = std::max(
            0, static_cast<int>(
                   std::floor(std::min({p[0].x, p[1].x, p[2].x}) - 0.5)));
        const int x1 = std::min(
            k.width - 1,
            static_cast<int>(
                std::ceil(std::max({p[0].x, p[1].x, p[2].x}) + 0.5)));
        const int y0 = std::max(
            0, static_cast<int>(
                   std::floor(std::min({p[0].y, p[1].y, p[2].y}) - 0.5)));
        const int y1 = std::min(
            k.height - 1,
            static_cast<int>(
                std::ceil(std::max({p[0].y, p[1].y, p[2].y}) + 0.5)));

        const bool tie0 = detail::edge_tie_accepts(p[1], p[2]);
        const bool tie1 = detail::edge_tie_accepts(p[2], p[0]);
        const bool tie2 = detail::edge_tie_accepts(p[0], p[1]);

        for (int y = y0; y <= y1; ++y) {
          const double py = y + 0.5;
          for (int x = x0; x <= x1; ++x) {
            const double px = x + 0.5;
            // Weight i belongs to vertex i (edge opposite it).
            const double e0 = detail::edge_function(p[1], p[2], px, py);
            const double e1 = detail::edge_function(p[2], p[0], px, py);
            const double e2 = detail::edge_function(p[0], p[1], px, py);
            const bool inside = (e0 > 0.0 || (e0 == 0.0 && tie0)) &&
                                (e1 > 0.0 || (e1 == 0.0 && tie1)) &&
                                (e2 > 0.0 || (e2 == 0.0 && tie2));
            if (!inside) continue;

            const double w0 = e0 / area;
            const double w1 = e1 / area;
            const double w2 = e2 / area;
            const double inv_z = w0 / z[0] + w1 / z[1] + w2 / z[2];
            const float depth = static_cast<float>(1.0 / inv_z);
            if (!(depth < out.depth.at(x, y))) continue;

            // Perspective-correct normal.
            const Vec3 n_raw = (v[0].normal * (w0 / z[0]) +
                                v[1].normal * (w1 / z[1]) +
                                v[2].normal * (w2 / z[2])) /
                               inv_z;
            const double n_len = n_raw.norm();
            const Vec3 n = n_len > 1e-12 ? n_raw / n_len : Vec3{0, 0, -1};
            const double lambert = std::max(0.0, dot(n, -light_dir));
            const double intensity = std::clamp(
                scene.light.ambient + scene.light.diffuse * lambert, 0.0,
                1.0);
            std::uint8_t* px_out = out.rgb.px(x, y);
            for (int ch = 0; ch < 3; ++ch) {
              const double value =
                  255.0 * intensity * mesh.base_color[ch];
              px_out[ch] = static_cast<std::uint8_t>(
                  std::clamp(std::lround(value), 0L, 255L));
            }
            out.depth.at(x, y) = depth;
            out.coverage.set(x, y, true);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace embodiswap
