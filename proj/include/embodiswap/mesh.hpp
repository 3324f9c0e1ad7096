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

// Triangle meshes for URDF visuals: OBJ and binary STL loaders plus
// box/cylinder/sphere primitives.

#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "embodiswap/errors.hpp"
#include "embodiswap/geometry.hpp"

namespace embodiswap {

struct Mesh {
  std::vector<Vec3> vertices;                  // local frame, meters
  std::vector<std::array<int, 3>> triangles;   // vertex indices
  std::vector<Vec3> normals;                   // per-vertex, unit
  std::array<double, 3> base_color{0.62, 0.62, 0.66};  // linear RGB
};

/// Area-weighted per-face normals accumulated onto vertices. Overwrites any
/// existing normals.
inline void compute_vertex_normals(Mesh& mesh) {
  mesh.normals.assign(mesh.vertices.size(), Vec3{});
  for (const auto& tri : mesh.triangles) {
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3& b = mesh.vertices[tri[1]];
    const Vec3& c = mesh.vertices[tri[2]];
    const Vec3 face = cross(b - a, c - a);  // magnitude = 2 * area
    mesh.normals[tri[0]] += face;
    mesh.normals[tri[1]] += face;
    mesh.normals[tri[2]] += face;
  }
  for (Vec3& n : mesh.normals) {
    const double len = n.norm();
    n = (len > 1e-20) ? n / len : Vec3{0, 0, 1};
  }
}

/// Bakes a (possibly non-uniform) scale into the vertices and recomputes
/// normals, so instances only ever apply rigid transforms.
inline void scale_mesh(Mesh& mesh, const Vec3& scale) {
  for (Vec3& v : mesh.vertices) {
    v = {v.x * scale.x, v.y * scale.y, v.z * scale.z};
  }
  compute_vertex_normals(mesh);
}

inline void validate_triangle_indices(const Mesh& mesh,
                                      const std::string& origin) {
  const int n = static_cast<int>(mesh.vertices.size());
  for (const auto& tri : mesh.triangles) {
    for (const int idx : tri) {
      if (idx < 0 || idx >= n) {
        throw Error(Errc::CorruptFile,
                    origin + ": face index " + std::to_string(idx) +
                        " out of range (have " + std::to_string(n) +
                        " vertices)");
      }
    }
  }
}

/// OBJ text: v/vn/f records, polygon faces fan-triangulated, negative
/// (relative) indices supported, vt and grouping keywords ignored. Corners
/// that pair one position with different normals are split.
inline Mesh parse_obj(const std::string& text, const std::string& origin) {
  std::vector<Vec3> positions;
  std::vector<Vec3> file_normals;
  Mesh mesh;
  // (position index, normal index or -1) -> output vertex
  std::map<std::pair<int, int>, int> corner_cache;
  bool any_missing_normal = false;

  auto parse_vec3 = [&](std::istringstream& in, int line_no) {
    double x, y, z;
    if (!(in >> x >> y >> z)) {
      throw Error(Errc::CorruptFile, origin + ": line " +
                                         std::to_string(line_no) +
                                         ": expected three numbers");
    }
    return Vec3{x, y, z};
  };

  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream in(line);
    std::string keyword;
    if (!(in >> keyword) || keyword[0] == '#') continue;

    if (keyword == "v") {
      positions.push_back(parse_vec3(in, line_no));
    } else if (keyword == "vn") {
      file_normals.push_back(parse_vec3(in, line_no));
    } else if (keyword == "f") {
      std::vector<int> corner_ids;
      std::string corner;
      while (in >> corner) {
        // Forms: v, v/t, v//n, v/t/n. Indices are 1-based; negative counts
        // from the end of the list seen so far.
        int pos_idx = 0, norm_idx = 0;
        bool has_norm = false;
        const size_t s1 = corner.find('/');
        try {
          pos_idx = std::stoi(corner.substr(0, s1));
          if (s1 != std::string::npos) {
            const size_t s2 = corner.find('/', s1 + 1);
            if (s2 != std::string::npos && s2 + 1 < corner.size()) {
              norm_idx = std::stoi(corner.substr(s2 + 1));
              has_norm = true;
            }
          }
        } catch (const std::exception&) {
          throw Error(Errc::CorruptFile, origin + ": line " +
                                             std::to_string(line_no) +
                                             ": bad face corner '" + corner +
                                             "'");
        }
        const int n_pos = static_cast<int>(positions.size());
        pos_idx = pos_idx > 0 ? pos_idx - 1 : n_pos + pos_idx;
        if (pos_idx < 0 || pos_idx >= n_pos) {
          throw Error(Errc::CorruptFile, origin + ": line " +
                                             std::to_string(line_no) +
                                             ": vertex index out of range");
        }
        if (has_norm) {
          const int n_norm = static_cast<int>(file_normals.size());
          norm_idx = norm_idx > 0 ? norm_idx - 1 : n_norm + norm_idx;
          if (norm_idx < 0 || norm_idx >= n_norm) {
            throw Error(Errc::CorruptFile, origin + ": line " +
                                               std::to_string(line_no) +
                                               ": normal index out of range");
          }
        } else {
          norm_idx = -1;
          any_missing_normal = true;
        }
        const auto key = std::make_pair(pos_idx, norm_idx);
        auto it = corner_cache.find(key);
        if (it == corner_cache.end()) {
          it = corner_cache
                   .emplace(key, static_cast<int>(mesh.vertices.size()))
                   .first;
          mesh.vertices.push_back(positions[pos_idx]);
          mesh.normals.push_back(norm_idx >= 0 ? file_normals[norm_idx]
                                               : Vec3{0, 0, 1});
        }
        corner_ids.push_back(it->second);
      }
      if (corner_ids.size() < 3) {
        throw Error(Errc::CorruptFile, origin + ": line " +
                                           std::to_string(line_no) +
                                           ": face needs 3+ corners");
      }
      for (size_t i = 1; i + 1 < corner_ids.size(); ++i) {
        mesh.triangles.push_back(
            {corner_ids[0], corner_ids[i], corner_ids[i + 1]});
      }
    }
    // o/g/s/mtllib/usemtl/vt and anything else: ignored.
  }

  if (mesh.vertices.empty() || mesh.triangles.empty()) {
    throw Error(Errc::CorruptFile, origin + ": no usable geometry");
  }
  if (any_missing_normal) {
    compute_vertex_normals(mesh);
  } else {
    for (Vec3& n : mesh.normals) {
      const double len = n.norm();
      if (len < 1e-20) {
        throw Error(Errc::CorruptFile, origin + ": zero-length normal");
      }
      n = n / len;
    }
  }
  return mesh;
}

/// Binary STL: 80-byte header, facet count, 50-byte records. Facet normals
/// are recomputed from geometry; identical vertices (within 1e-9) are
/// merged into an indexed mesh.
inline Mesh parse_binary_stl(const std::string& bytes,
                             const std::string& origin) {
  if (bytes.size() < 84) {
    throw Error(Errc::CorruptFile, origin + ": truncated STL header");
  }
  std::uint32_t count;
  std::memcpy(&count, bytes.data() + 80, 4);
  if (bytes.size() != 84 + static_cast<size_t>(count) * 50) {
    throw Error(Errc::CorruptFile,
                origin + ": size mismatch, header claims " +
                    std::to_string(count) + " facets");
  }
  if (count == 0) {
    throw Error(Errc::CorruptFile, origin + ": no facets");
  }

  Mesh mesh;
  std::map<std::array<long long, 3>, int> merged;
  auto vertex_id = [&](const Vec3& v) {
    const std::array<long long, 3> key{std::llround(v.x * 1e9),
                                       std::llround(v.y * 1e9),
                                       std::llround(v.z * 1e9)};
    auto it = merged.find(key);
    if (it == merged.end()) {
      it = merged.emplace(key, static_cast<int>(mesh.vertices.size())).first;
      mesh.vertices.push_back(v);
    }
    return it->second;
  };

  for (std::uint32_t f = 0; f < count; ++f) {
    const char* rec = bytes.data() + 84 + f * 50;
    std::array<int, 3> tri;
    for (int v = 0; v < 3; ++v) {
      float xyz[3];
      std::memcpy(xyz, rec + 12 + v * 12, 12);
      if (!std::isfinite(xyz[0]) || !std::isfinite(xyz[1]) ||
          !std::isfinite(xyz[2])) {
        throw Error(Errc::CorruptFile, origin + ": non-finite vertex");
      }
      tri[v] = vertex_id({xyz[0], xyz[1], xyz[2]});
    }
    mesh.triangles.push_back(tri);
  }
  compute_vertex_normals(mesh);
  return mesh;
}

/// Loads OBJ or binary STL by extension. UnsupportedFormat for anything
/// else; CorruptFile for unreadable content.
inline Mesh load_mesh(const std::string& path) {
  std::string lower = path;
  for (char& c : lower) c = static_cast<char>(std::tolower(c));
  const bool is_obj = lower.ends_with(".obj");
  const bool is_stl = lower.ends_with(".stl");
  if (!is_obj && !is_stl) {
    throw Error(Errc::UnsupportedFormat,
                "'" + path + "' is neither .obj nor .stl");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::IoError, "cannot open mesh '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  Mesh mesh =
      is_obj ? parse_obj(buf.str(), path) : parse_binary_stl(buf.str(), path);
  validate_triangle_indices(mesh, path);
  return mesh;
}

namespace detail {

inline void require_positive(double value, const char* what) {
  if (!(value > 0.0)) {
    throw Error(Errc::NonPositiveDimension,
                std::string(what) + " must be positive, got " +
                    std::to_string(value));
  }
}

/// Appends a quad wound so its normal points along `outward`.
inline void add_quad(Mesh& mesh, int a, int b, int c, int d,
                     const Vec3& outward) {
  const Vec3 n = cross(mesh.vertices[b] - mesh.vertices[a],
                       mesh.vertices[c] - mesh.vertices[a]);
  if (dot(n, outward) >= 0.0) {
    mesh.triangles.push_back({a, b, c});
    mesh.triangles.push_back({a, c, d});
  } else {
    mesh.triangles.push_back({a, c, b});
    mesh.triangles.push_back({a, d, c});
  }
}

}  // namespace detail

/// Axis-aligned box centered at the origin: 8 vertices, 12 triangles.
inline Mesh make_box(const Vec3& size) {
  detail::require_positive(size.x, "box size.x");
  detail::require_positive(size.y, "box size.y");
  detail::require_positive(size.z, "box size.z");
  Mesh mesh;
  const Vec3 h = size * 0.5;
  for (int i = 0; i < 8; ++i) {
    mesh.vertices.push_back({(i & 1) ? h.x : -h.x, (i & 2) ? h.y : -h.y,
                             (i & 4) ? h.z : -h.z});
  }
  detail::add_quad(mesh, 0, 2, 6, 4, {-1, 0, 0});
  detail::add_quad(mesh, 1, 3, 7, 5, {1, 0, 0});
  detail::add_quad(mesh, 0, 1, 5, 4, {0, -1, 0});
  detail::add_quad(mesh, 2, 3, 7, 6, {0, 1, 0});
  detail::add_quad(mesh, 0, 1, 3, 2, {0, 0, -1});
  detail::add_quad(mesh, 4, 5, 7, 6, {0, 0, 1});
  compute_vertex_normals(mesh);
  return mesh;
}

/// Cylinder along z, centered at the origin (URDF convention).
inline Mesh make_cylinder(double radius, double length, int segments = 32) {
  detail::require_positive(radius, "cylinder radius");
  detail::require_positive(length, "cylinder length");
  segments = std::max(segments, 3);
  Mesh mesh;
  const double h = length * 0.5;
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * std::numbers::pi * i / segments;
    const double x = radius * std::cos(a);
    const double y = radius * std::sin(a);
    mesh.vertices.push_back({x, y, -h});
    mesh.vertices.push_back({x, y, h});
  }
  const int bottom_center = static_cast<int>(mesh.vertices.size());
  mesh.vertices.push_back({0, 0, -h});
  const int top_center = bottom_center + 1;
  mesh.vertices.push_back({0, 0, h});
  for (int i = 0; i < segments; ++i) {
    const int j = (i + 1) % segments;
    const Vec3 out = mesh.vertices[2 * i] + mesh.vertices[2 * j];
    detail::add_quad(mesh, 2 * i, 2 * j, 2 * j + 1, 2 * i + 1,
                     {out.x, out.y, 0});
    // Caps.
    const Vec3 bn =
        cross(mesh.vertices[2 * j] - mesh.vertices[bottom_center],
              mesh.vertices[2 * i] - mesh.vertices[bottom_center]);
    if (bn.z < 0) {
      mesh.triangles.push_back({bottom_center, 2 * j, 2 * i});
    } else {
      mesh.triangles.push_back({bottom_center, 2 * i, 2 * j});
    }
    const Vec3 tn = cross(mesh.vertices[2 * i + 1] - mesh.vertices[top_center],
                          mesh.vertices[2 * j + 1] - mesh.vertices[top_center]);
    if (tn.z > 0) {
      mesh.triangles.push_back({top_center, 2 * i + 1, 2 * j + 1});
    } else {
      mesh.triangles.push_back({top_center, 2 * j + 1, 2 * i + 1});
    }
  }
  compute_vertex_normals(mesh);
  return mesh;
}

/// Latitude/longitude sphere; every vertex sits at distance r.
inline Mesh make_sphere(double radius, int segments = 32) {
  detail::require_positive(radius, "sphere radius");
  segments = std::max(segments, 3);
  const int stacks = std::max(segments / 2, 2);
  Mesh mesh;
  mesh.vertices.push_back({0, 0, radius});   // north pole
  for (int s = 1; s < stacks; ++s) {
    const double phi = std::numbers::pi * s / stacks;
    for (int i = 0; i < segments; ++i) {
      const double a = 2.0 * std::numbers::pi * i / segments;
      mesh.vertices.push_back({radius * std::sin(phi) * std::cos(a),
                               radius * std::sin(phi) * std::sin(a),
                               radius * std::cos(phi)});
    }
  }
  const int south = static_cast<int>(mesh.vertices.size());
  mesh.vertices.push_back({0, 0, -radius});

  auto ring = [&](int s, int i) { return 1 + (s - 1) * segments + i % segments; };
  for (int i = 0; i < segments; ++i) {
    mesh.triangles.push_back({0, ring(1, i), ring(1, i + 1)});
    mesh.triangles.push_back({south, ring(stacks - 1, i + 1),
                              ring(stacks - 1, i)});
  }
  for (int s = 1; s + 1 < stacks; ++s) {
    for (int i = 0; i < segments; ++i) {
      detail::add_quad(mesh, ring(s, i), ring(s, i + 1), ring(s + 1, i + 1),
                       ring(s + 1, i),
                       mesh.vertices[ring(s, i)] + mesh.vertices[ring(s + 1, i + 1)]);
    }
  }
  compute_vertex_normals(mesh);
  return mesh;
}

}  // namespace embodiswap
