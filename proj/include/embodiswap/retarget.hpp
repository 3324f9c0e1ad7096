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

// Hand-to-gripper retargeting: maps 21 MANO hand keypoints to a 6-DOF
// end-effector pose. Two- and three-finger grippers share the same frame;
// morphology only changes which robot model gets rendered.

#pragma once

#include <array>
#include <cmath>
#include <string>

#include "embodiswap/errors.hpp"
#include "embodiswap/geometry.hpp"

namespace embodiswap {

enum class HandSide { Left, Right };

/// MANO 21-joint indexing: 0 wrist, 1-4 thumb, 5-8 index, 9-12 middle,
/// 13-16 ring, 17-20 pinky (base joint first within each finger).
inline constexpr int kWrist = 0;
inline constexpr int kThumbBase = 1;
inline constexpr int kIndexBase = 5;
inline constexpr int kMiddleBase = 9;
inline constexpr int kRingBase = 13;
inline constexpr int kPinkyBase = 17;

/// 21 MANO joint positions in the camera frame, meters.
struct HandKeypoints {
  std::array<Vec3, 21> points;
  HandSide side = HandSide::Right;
};

/// Largest inter-keypoint distance; a plausible hand spans 0.03-0.40 m.
inline double keypoint_span(const HandKeypoints& kp) {
  double best = 0.0;
  for (int i = 0; i < 21; ++i) {
    for (int j = i + 1; j < 21; ++j) {
      best = std::max(best, (kp.points[i] - kp.points[j]).squared_norm());
    }
  }
  return std::sqrt(best);
}

inline constexpr double kMinHandSpan = 0.03;
inline constexpr double kMaxHandSpan = 0.40;

/// Ingestion-boundary plausibility check. The math below does not enforce
/// this; the pipeline rejects implausible reconstructions before retargeting.
inline bool plausible_hand(const HandKeypoints& kp) {
  for (const Vec3& p : kp.points) {
    if (!p.finite()) return false;
  }
  const double span = keypoint_span(kp);
  return span >= kMinHandSpan && span <= kMaxHandSpan;
}

/// Palm center: mean of the wrist-adjacent thumb joint and the four finger
/// base joints.
inline Vec3 gripper_center(const HandKeypoints& kp) {
  return (kp.points[kThumbBase] + kp.points[kIndexBase] +
          kp.points[kMiddleBase] + kp.points[kRingBase] +
          kp.points[kPinkyBase]) *
         (1.0 / 5.0);
}

/// Raw (unnormalized) gripper frame directions.
///   z: palm normal, (kp5 - kp0) x (kp17 - kp0)
///   x: first thumb joint toward the centroid of the finger base joints
///   y: z cross x, sign-flipped for left hands to keep the frame
///      right-handed
struct GripperAxes {
  Vec3 x;
  Vec3 y;
  Vec3 z;
};

inline GripperAxes gripper_axes(const HandKeypoints& kp) {
  const Vec3 z = cross(kp.points[kIndexBase] - kp.points[kWrist],
                       kp.points[kPinkyBase] - kp.points[kWrist]);
  if (z.norm() < 1e-8) {
    throw Error(Errc::DegenerateHand,
                "collinear palm landmarks, |Gz| = " + std::to_string(z.norm()));
  }
  const Vec3 x = (kp.points[kIndexBase] + kp.points[kMiddleBase] +
                  kp.points[kRingBase] + kp.points[kPinkyBase]) *
                     0.25 -
                 kp.points[kThumbBase];
  if (x.norm() < 1e-12 ||
      std::abs(dot(normalized(x), normalized(z))) > 0.999) {
    throw Error(Errc::DegenerateHand, "thumb axis parallel to palm normal");
  }
  const Vec3 y_raw = cross(z, x);
  const Vec3 y = (kp.side == HandSide::Right) ? y_raw : -y_raw;
  return {x, y, z};
}

/// Retargeted end-effector pose T_g in the camera frame.
///
/// The raw x and z directions are generally not orthogonal, yet the result
/// must be a rigid pose. The palm normal is the most stable landmark, so z
/// is kept exact: y = normalize(side * (z x x)), then x is recomputed as
/// y x z. The output rotation is orthonormal with det = +1 for both hand
/// sides.
inline SE3 retarget_pose(const HandKeypoints& kp) {
  const GripperAxes g = gripper_axes(kp);
  const Vec3 z_hat = normalized(g.z);
  const Vec3 y_hat = normalized(g.y);
  const Vec3 x_hat = cross(y_hat, z_hat);
  return {Rot3::from_cols(x_hat, y_hat, z_hat), gripper_center(kp)};
}

using GripperPose = SE3;

inline HandSide hand_side_from_string(const std::string& s) {
  if (s == "left" || s == "Left") return HandSide::Left;
  if (s == "right" || s == "Right") return HandSide::Right;
  throw Error(Errc::UnknownHand, "unrecognized hand side '" + s + "'");
}

inline const char* to_string(HandSide side) {
  return side == HandSide::Left ? "left" : "right";
}

}  // namespace embodiswap
