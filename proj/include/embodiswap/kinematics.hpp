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

// Forward kinematics, the geometric end-effector Jacobian, and a damped
// least squares IK solver. DLS stays well-behaved near joint singularities,
// which matter here because retargeted hand poses routinely graze them.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "embodiswap/errors.hpp"
#include "embodiswap/geometry.hpp"
#include "embodiswap/urdf.hpp"

namespace embodiswap {

/// One value per non-fixed joint, in the model's actuated-joint order.
/// Radians for revolute, meters for prismatic.
using JointConfig = std::vector<double>;

struct IkParams {
  double damping = 0.05;
  int max_iters = 200;
  double pos_tol = 1e-4;   // meters
  double rot_tol = 1e-3;   // radians
  double step_scale = 1.0;

  bool is_valid() const {
    return damping > 0.0 && max_iters > 0 && pos_tol > 0.0 && rot_tol > 0.0 &&
           step_scale > 0.0;
  }
};

struct IkResult {
  JointConfig config;
  double residual_pos = 0.0;  // meters
  double residual_rot = 0.0;  // radians
  bool converged = false;
  int iterations = 0;
};

inline void check_config_length(const KinematicModel& model,
                                const JointConfig& q) {
  if (q.size() != model.dof()) {
    throw Error(Errc::ConfigLengthMismatch,
                "config has " + std::to_string(q.size()) + " values, model " +
                    std::to_string(model.dof()) + " non-fixed joints");
  }
}

/// Mid-range of every joint's limits; the default seed and the fixed
/// "mid-aperture" value gripper fingers hold when IK never moves them.
inline JointConfig mid_limit_config(const KinematicModel& model) {
  JointConfig q;
  q.reserve(model.dof());
  for (const int j : model.actuated_joints) {
    q.push_back(0.5 * (model.joints[j].limits.lower +
                       model.joints[j].limits.upper));
  }
  return q;
}

inline void clamp_to_limits(const KinematicModel& model, JointConfig& q) {
  check_config_length(model, q);
  for (size_t i = 0; i < q.size(); ++i) {
    const JointLimits& lim = model.joints[model.actuated_joints[i]].limits;
    q[i] = std::clamp(q[i], lim.lower, lim.upper);
  }
}

inline bool within_limits(const KinematicModel& model, const JointConfig& q) {
  for (size_t i = 0; i < q.size(); ++i) {
    const JointLimits& lim = model.joints[model.actuated_joints[i]].limits;
    if (q[i] < lim.lower || q[i] > lim.upper) return false;
  }
  return true;
}

/// Root-frame pose of every link, indexed like model.links. The root link
/// pose is the identity. child = parent * joint.origin * motion(q_i).
inline std::vector<SE3> forward_kinematics(const KinematicModel& model,
                                           const JointConfig& q) {
  check_config_length(model, q);
  std::vector<SE3> pose(model.links.size());
  // Links are visited parents-first: child_joints edges out of a resolved
  // link always lead to unresolved children (tree invariant).
  std::vector<int> stack{model.root_link};
  while (!stack.empty()) {
    const int link = stack.back();
    stack.pop_back();
    for (const int j : model.links[link].child_joints) {
      const Joint& joint = model.joints[j];
      SE3 motion;
      if (joint.type == JointType::Revolute) {
        motion.rotation = Rot3::from_axis_angle(joint.axis * q[joint.q_index]);
      } else if (joint.type == JointType::Prismatic) {
        motion.translation = joint.axis * q[joint.q_index];
      }
      pose[joint.child_link] = pose[link] * joint.origin * motion;
      stack.push_back(joint.child_link);
    }
  }
  return pose;
}

/// 6 x n end-effector Jacobian. Rows 0-2: linear velocity (m), rows 3-5:
/// angular velocity (rad), both in the root frame; one column per actuated
/// joint. Joints off the root-to-effector chain contribute zero columns.
struct Jacobian {
  int cols = 0;
  std::vector<double> a;  // row-major, 6 * cols

  double at(int r, int c) const { return a[r * cols + c]; }
  double& at(int r, int c) { return a[r * cols + c]; }
};

inline Jacobian ee_jacobian(const KinematicModel& model,
                            const JointConfig& q) {
  check_config_length(model, q);
  if (model.end_effector_link < 0) {
    throw Error(Errc::MissingLink, "end effector link not set");
  }
  const std::vector<SE3> pose = forward_kinematics(model, q);
  const Vec3 p_ee = pose[model.end_effector_link].translation;

  // Actuated joints on the chain root -> end effector.
  std::vector<bool> on_chain(model.joints.size(), false);
  for (int link = model.end_effector_link; link != model.root_link;) {
    const int j = model.links[link].parent_joint;
    on_chain[j] = true;
    link = model.joints[j].parent_link;
  }

  Jacobian jac;
  jac.cols = static_cast<int>(model.dof());
  jac.a.assign(6 * model.dof(), 0.0);
  for (size_t col = 0; col < model.actuated_joints.size(); ++col) {
    const int j = model.actuated_joints[col];
    if (!on_chain[j]) continue;
    const Joint& joint = model.joints[j];
    // The joint axis is fixed in the child frame; rotation about it (or
    // translation along it) leaves the world-frame direction equal through
    // the child pose.
    const Vec3 axis_w = pose[joint.child_link].rotation * joint.axis;
    Vec3 lin, ang;
    if (joint.type == JointType::Revolute) {
      const Vec3 p_joint = pose[joint.child_link].translation;
      lin = cross(axis_w, p_ee - p_joint);
      ang = axis_w;
    } else {  // prismatic
      lin = axis_w;
      ang = {0, 0, 0};
    }
    jac.at(0, static_cast<int>(col)) = lin.x;
    jac.at(1, static_cast<int>(col)) = lin.y;
    jac.at(2, static_cast<int>(col)) = lin.z;
    jac.at(3, static_cast<int>(col)) = ang.x;
    jac.at(4, static_cast<int>(col)) = ang.y;
    jac.at(5, static_cast<int>(col)) = ang.z;
  }
  return jac;
}

namespace detail {

/// Solves A x = b for symmetric positive definite 6x6 A via Cholesky.
inline std::array<double, 6> solve_spd6(std::array<double, 36>& A,
                                        const std::array<double, 6>& b) {
  std::array<double, 36> L{};
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = A[i * 6 + j];
      for (int k = 0; k < j; ++k) sum -= L[i * 6 + k] * L[j * 6 + k];
      if (i == j) {
        L[i * 6 + i] = std::sqrt(std::max(sum, 1e-300));
      } else {
        L[i * 6 + j] = sum / L[j * 6 + j];
      }
    }
  }
  std::array<double, 6> y{};
  for (int i = 0; i < 6; ++i) {
    double sum = b[i];
    for (int k = 0; k < i; ++k) sum -= L[i * 6 + k] * y[k];
    y[i] = sum / L[i * 6 + i];
  }
  std::array<double, 6> x{};
  for (int i = 5; i >= 0; --i) {
    double sum = y[i];
    for (int k = i + 1; k < 6; ++k) sum -= L[k * 6 + i] * x[k];
    x[i] = sum / L[i * 6 + i];
  }
  return x;
}

}  // namespace detail

/// Damped least squares IK: dq = J^T (J J^T + lambda^2 I)^{-1} e, with the
/// config clamped to joint limits after every step. The rotation error is
/// the axis-angle of (R_current^{-1} R_target) expressed in the root frame.
///
/// Unreachable targets are not an error: the best iterate found is returned
/// with converged = false and honest residuals; the caller decides policy.
inline IkResult solve_ik(const KinematicModel& model, const SE3& target,
                         const JointConfig& seed, const IkParams& params) {
  if (!params.is_valid()) {
    throw Error(Errc::ConfigInvalid, "IK parameters must be positive");
  }
  if (model.end_effector_link < 0) {
    throw Error(Errc::MissingLink, "end effector link not set");
  }
  check_config_length(model, seed);

  JointConfig q = seed;
  clamp_to_limits(model, q);

  Vec3 e_pos, e_rot;
  auto evaluate = [&](const JointConfig& cfg) {
    const std::vector<SE3> pose = forward_kinematics(model, cfg);
    const SE3& ee = pose[model.end_effector_link];
    e_pos = target.translation - ee.translation;
    const AxisAngle local =
        (ee.rotation.transpose() * target.rotation).to_axis_angle();
    e_rot = ee.rotation * local;
  };

  IkResult best;
  best.config = q;
  best.residual_pos = std::numeric_limits<double>::infinity();
  best.residual_rot = std::numeric_limits<double>::infinity();
  double best_score = std::numeric_limits<double>::infinity();

  const double lambda2 = params.damping * params.damping;
  int iter = 0;
  for (;; ++iter) {
    evaluate(q);
    const double res_pos = e_pos.norm();
    const double res_rot = e_rot.norm();
    const double score =
        std::max(res_pos / params.pos_tol, res_rot / params.rot_tol);
    if (std::isfinite(score) && score < best_score) {
      best_score = score;
      best.config = q;
      best.residual_pos = res_pos;
      best.residual_rot = res_rot;
    }
    if (res_pos <= params.pos_tol && res_rot <= params.rot_tol) {
      best.converged = true;
      break;
    }
    if (iter >= params.max_iters) break;

    const Jacobian jac = ee_jacobian(model, q);
    const std::array<double, 6> e{e_pos.x, e_pos.y, e_pos.z,
                                  e_rot.x, e_rot.y, e_rot.z};
    std::array<double, 36> A{};
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c <= r; ++c) {
        double sum = 0.0;
        for (int k = 0; k < jac.cols; ++k) sum += jac.at(r, k) * jac.at(c, k);
        A[r * 6 + c] = sum;
        A[c * 6 + r] = sum;
      }
      A[r * 6 + r] += lambda2;
    }
    const std::array<double, 6> y = detail::solve_spd6(A, e);
    for (int c = 0; c < jac.cols; ++c) {
      double dq = 0.0;
      for (int r = 0; r < 6; ++r) dq += jac.at(r, c) * y[r];
      q[c] += params.step_scale * dq;
    }
    clamp_to_limits(model, q);
  }
  best.iterations = iter;
  return best;
}

}  // namespace embodiswap
