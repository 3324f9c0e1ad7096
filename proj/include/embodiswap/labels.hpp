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

// Relative 6-DOF training labels: each frame paired with a future frame at a
// per-action look-ahead, camera ego-motion compensated through the world
// frame, expressed in the current gripper frame.

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "embodiswap/errors.hpp"
#include "embodiswap/geometry.hpp"

namespace embodiswap {

struct TrajectoryFrame {
  int index = 0;             // frame number within the source video
  SE3 gripper_pose_cam;      // retargeted gripper pose, camera frame
  SE3 world_from_camera;     // upstream camera pose
  double timestamp = 0.0;    // seconds
};

/// Six scalars: translation (m) and axis-angle rotation (rad), the relative
/// gripper transform from frame_index to frame_index + lookahead_k,
/// expressed in the frame-t gripper frame.
struct RelPoseLabel {
  int frame_index = 0;
  int lookahead_k = 0;
  Vec3 translation;
  AxisAngle rotation;
};

inline constexpr const char* kLabelConvention = "current_gripper";

/// Per-action look-ahead in frames: short for rapid motions, long for slow
/// ones.
struct LookaheadPolicy {
  std::map<std::string, int> per_action;

  static LookaheadPolicy defaults() {
    return {{{"open", 8}, {"close", 8}, {"cut", 8}, {"pour", 16},
             {"place", 16}}};
  }

  int lookahead_for(const std::string& action) const {
    const auto it = per_action.find(action);
    if (it == per_action.end()) {
      throw Error(Errc::UnknownActionClass,
                  "no look-ahead configured for action '" + action + "'");
    }
    return it->second;
  }

  bool is_valid() const {
    for (const auto& [action, k] : per_action) {
      if (k < 1) return false;
    }
    return !per_action.empty();
  }
};

/// Camera compensation: gripper pose in the world frame.
inline SE3 to_world(const TrajectoryFrame& frame) {
  return frame.world_from_camera * frame.gripper_pose_cam;
}

/// Label pairing traj[t_pos] with traj[t_pos + k]:
/// T_rel = world_pose(t)^{-1} * world_pose(t+k).
inline RelPoseLabel make_label(const std::vector<TrajectoryFrame>& traj,
                               size_t t_pos, int k) {
  if (k < 1 || t_pos >= traj.size() ||
      t_pos + static_cast<size_t>(k) >= traj.size()) {
    throw Error(Errc::LookaheadOutOfRange,
                "frame position " + std::to_string(t_pos) + " + k " +
                    std::to_string(k) + " exceeds clip of " +
                    std::to_string(traj.size()) + " frames");
  }
  const SE3 rel =
      relative(to_world(traj[t_pos]), to_world(traj[t_pos + k]));
  RelPoseLabel label;
  label.frame_index = traj[t_pos].index;
  label.lookahead_k = k;
  label.translation = rel.translation;
  label.rotation = rel.rotation.to_axis_angle();
  return label;
}

/// Labels for a whole clip: one per frame position t in [0, len - k - 1],
/// skipping any pair whose endpoints include an excluded frame (IK
/// unreachable or degenerate hand; indices are source frame numbers).
inline std::vector<RelPoseLabel> label_clip(
    const std::vector<TrajectoryFrame>& traj, const std::string& action,
    const LookaheadPolicy& policy, const std::set<int>& excluded_frames = {}) {
  const int k = policy.lookahead_for(action);
  std::vector<RelPoseLabel> labels;
  if (traj.size() <= static_cast<size_t>(k)) return labels;
  for (size_t t = 0; t + static_cast<size_t>(k) < traj.size(); ++t) {
    if (excluded_frames.count(traj[t].index) ||
        excluded_frames.count(traj[t + k].index)) {
      continue;
    }
    labels.push_back(make_label(traj, t, k));
  }
  return labels;
}

}  // namespace embodiswap
