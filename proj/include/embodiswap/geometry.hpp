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

// Rigid-body transforms, rotation representations, and the pinhole camera
// model shared by every other module.
//
// Camera convention (used everywhere in this library): +Z forward, +X right,
// +Y down. Depth maps, intrinsics, and hand keypoints are all expressed in
// this frame; mixing conventions silently flips retargeted poses.

#pragma once

#include <array>
#include <cmath>
#include <limits>

#include "embodiswap/errors.hpp"

namespace embodiswap {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  double squared_norm() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(squared_norm()); }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z,
          a.x * b.y - a.y * b.x};
}

inline Vec3 normalized(const Vec3& v) { return v / v.norm(); }

/// Rotation vector: unit axis scaled by the angle in radians. Canonical form
/// has magnitude in [0, pi].
using AxisAngle = Vec3;

/// 3x3 rotation matrix, row-major. Constructors and factory functions keep
/// the orthonormal/proper invariants; raw element access does not.
struct Rot3 {
  std::array<double, 9> m = {1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Rot3 identity() { return Rot3{}; }

  static Rot3 from_cols(const Vec3& x, const Vec3& y, const Vec3& z) {
    Rot3 r;
    r.m = {x.x, y.x, z.x, x.y, y.y, z.y, x.z, y.z, z.z};
    return r;
  }

  double at(int row, int col) const { return m[3 * row + col]; }
  double& at(int row, int col) { return m[3 * row + col]; }

  Vec3 col(int j) const { return {m[j], m[3 + j], m[6 + j]}; }
  Vec3 row(int i) const { return {m[3 * i], m[3 * i + 1], m[3 * i + 2]}; }

  Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }

  Rot3 operator*(const Rot3& o) const {
    Rot3 r;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        r.m[3 * i + j] = m[3 * i] * o.m[j] + m[3 * i + 1] * o.m[3 + j] +
                         m[3 * i + 2] * o.m[6 + j];
      }
    }
    return r;
  }

  Rot3 transpose() const {
    Rot3 r;
    r.m = {m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]};
    return r;
  }

  /// Inverse of a rotation is its transpose.
  Rot3 inverse() const { return transpose(); }

  double trace() const { return m[0] + m[4] + m[8]; }

  double det() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) -
           m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
  }

  /// Max-abs entry of R^T R - I; zero for an exactly orthonormal matrix.
  double orthonormality_error() const {
    const Rot3 g = transpose() * (*this);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double target = (i == j) ? 1.0 : 0.0;
        worst = std::max(worst, std::abs(g.at(i, j) - target));
      }
    }
    return worst;
  }

  bool is_valid(double tol = 1e-6) const {
    return orthonormality_error() <= tol && std::abs(det() - 1.0) <= tol;
  }

  static Rot3 rx(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Rot3 r;
    r.m = {1, 0, 0, 0, c, -s, 0, s, c};
    return r;
  }
  static Rot3 ry(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Rot3 r;
    r.m = {c, 0, s, 0, 1, 0, -s, 0, c};
    return r;
  }
  static Rot3 rz(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Rot3 r;
    r.m = {c, -s, 0, s, c, 0, 0, 0, 1};
    return r;
  }

  static Rot3 from_axis_angle(const AxisAngle& v);
  AxisAngle to_axis_angle() const;
};

/// URDF-style fixed-axis roll/pitch/yaw: Rz(yaw) * Ry(pitch) * Rx(roll).
inline Rot3 rotation_from_rpy(double roll, double pitch, double yaw) {
  return Rot3::rz(yaw) * Rot3::ry(pitch) * Rot3::rx(roll);
}

/// Rodrigues formula. Uses a second-order Taylor expansion below 1e-8 rad
/// where sin/cos ratios lose precision.
inline Rot3 Rot3::from_axis_angle(const AxisAngle& v) {
  const double theta = v.norm();
  double a;  // sin(theta) / theta
  double b;  // (1 - cos(theta)) / theta^2
  if (theta < 1e-8) {
    a = 1.0 - theta * theta / 6.0;
    b = 0.5 - theta * theta / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  }
  const double x = v.x, y = v.y, z = v.z;
  Rot3 r;
  r.m = {1.0 - b * (y * y + z * z), b * x * y - a * z, b * x * z + a * y,
         b * x * y + a * z, 1.0 - b * (x * x + z * z), b * y * z - a * x,
         b * x * z - a * y, b * y * z + a * x, 1.0 - b * (x * x + y * y)};
  return r;
}

/// Logarithm with magnitude in [0, pi], via unit-quaternion extraction.
/// Away from pi the scalar part sqrt(trace + 1) is well conditioned; when
/// trace < -1 + 1e-6 it is not, and the vector part comes instead from the
/// dominant diagonal of the symmetric part (the eigenvector of eigenvalue
/// +1). At exactly pi the axis sign is inherently ambiguous.
inline AxisAngle Rot3::to_axis_angle() const {
  double w, x, y, z;
  if (trace() >= -1.0 + 1e-6) {
    const double s = 2.0 * std::sqrt(std::max(trace() + 1.0, 0.0));
    w = 0.25 * s;
    x = (at(2, 1) - at(1, 2)) / s;
    y = (at(0, 2) - at(2, 0)) / s;
    z = (at(1, 0) - at(0, 1)) / s;
  } else if (at(0, 0) >= at(1, 1) && at(0, 0) >= at(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + at(0, 0) - at(1, 1) - at(2, 2));
    w = (at(2, 1) - at(1, 2)) / s;
    x = 0.25 * s;
    y = (at(0, 1) + at(1, 0)) / s;
    z = (at(0, 2) + at(2, 0)) / s;
  } else if (at(1, 1) >= at(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + at(1, 1) - at(0, 0) - at(2, 2));
    w = (at(0, 2) - at(2, 0)) / s;
    x = (at(0, 1) + at(1, 0)) / s;
    y = 0.25 * s;
    z = (at(1, 2) + at(2, 1)) / s;
  } else {
    const double s = 2.0 * std::sqrt(1.0 + at(2, 2) - at(0, 0) - at(1, 1));
    w = (at(1, 0) - at(0, 1)) / s;
    x = (at(0, 2) + at(2, 0)) / s;
    y = (at(1, 2) + at(2, 1)) / s;
    z = 0.25 * s;
  }
  if (w < 0.0) {
    w = -w;
    x = -x;
    y = -y;
    z = -z;
  }
  const Vec3 vec{x, y, z};
  const double n = vec.norm();
  if (n < 1e-300) return {0, 0, 0};
  const double theta = 2.0 * std::atan2(n, w);
  return (vec / n) * theta;
}

/// Rigid transform: rotation then translation (meters).
struct SE3 {
  Rot3 rotation;
  Vec3 translation;

  static SE3 identity() { return SE3{}; }

  /// Composition a * b applies b first, then a.
  SE3 operator*(const SE3& o) const {
    return {rotation * o.rotation, rotation * o.translation + translation};
  }

  /// Transforms a point.
  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }

  SE3 inverse() const {
    const Rot3 rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }

  bool is_valid(double tol = 1e-6) const {
    return rotation.is_valid(tol) && translation.finite();
  }

  /// Row-major 4x4, the wire format for every file that carries poses.
  std::array<double, 16> to_matrix() const {
    return {rotation.m[0], rotation.m[1], rotation.m[2], translation.x,
            rotation.m[3], rotation.m[4], rotation.m[5], translation.y,
            rotation.m[6], rotation.m[7], rotation.m[8], translation.z,
            0.0,           0.0,           0.0,           1.0};
  }

  static SE3 from_matrix(const std::array<double, 16>& m) {
    SE3 t;
    t.rotation.m = {m[0], m[1], m[2], m[4], m[5], m[6], m[8], m[9], m[10]};
    t.translation = {m[3], m[7], m[11]};
    return t;
  }
};

/// Transform of b expressed in a's frame: a^{-1} * b.
inline SE3 relative(const SE3& a, const SE3& b) { return a.inverse() * b; }

/// Pinhole intrinsics in pixels. Valid when fx,fy > 0 and the principal
/// point lies inside the image.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  bool is_valid() const {
    return fx > 0.0 && fy > 0.0 && width > 0 && height > 0 && cx >= 0.0 &&
           cx < width && cy >= 0.0 && cy < height;
  }
};

struct PixelSample {
  Vec2 px;
  double depth = 0.0;  // camera-space z, meters
};

/// Projects a camera-frame point. Throws NonPositiveDepth for points on or
/// behind the camera plane (z <= 1e-9).
inline PixelSample project(const CameraIntrinsics& k, const Vec3& p) {
  if (!(p.z > 1e-9)) {
    throw Error(Errc::NonPositiveDepth,
                "cannot project point with z = " + std::to_string(p.z));
  }
  return {{k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy}, p.z};
}

/// Inverse pinhole model: pixel + depth back to a camera-frame point.
inline Vec3 unproject(const CameraIntrinsics& k, const Vec2& px,
                      double depth) {
  return {(px.x - k.cx) / k.fx * depth, (px.y - k.cy) / k.fy * depth, depth};
}

}  // namespace embodiswap
