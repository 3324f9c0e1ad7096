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

// Robot description fixtures shared across the suite.

#pragma once

#include <iomanip>
#include <random>
#include <sstream>
#include <string>

namespace embodiswap::testing {

/// Planar two-link arm, 0.5 m + 0.5 m, both joints revolute about +z, with a
/// fixed tool frame at the forearm tip. Reach: 1.0 m.
inline std::string planar2_urdf() {
  return R"(<?xml version="1.0"?>
<robot name="planar2">
  <link name="base">
    <visual>
      <geometry><box size="0.1 0.1 0.05"/></geometry>
    </visual>
  </link>
  <link name="upper_arm">
    <visual>
      <origin xyz="0.25 0 0"/>
      <geometry><box size="0.5 0.04 0.04"/></geometry>
      <material name="steel"><color rgba="0.4 0.45 0.5 1"/></material>
    </visual>
  </link>
  <link name="forearm">
    <visual>
      <origin xyz="0.25 0 0"/>
      <geometry><box size="0.5 0.03 0.03"/></geometry>
    </visual>
  </link>
  <link name="tool"/>
  <joint name="shoulder" type="revolute">
    <parent link="base"/>
    <child link="upper_arm"/>
    <origin xyz="0 0 0"/>
    <axis xyz="0 0 1"/>
    <limit lower="-3.14159265" upper="3.14159265" effort="30" velocity="2"/>
  </joint>
  <joint name="elbow" type="revolute">
    <parent link="upper_arm"/>
    <child link="forearm"/>
    <origin xyz="0.5 0 0"/>
    <axis xyz="0 0 1"/>
    <limit lower="-3.14159265" upper="3.14159265" effort="30" velocity="2"/>
  </joint>
  <joint name="tool_mount" type="fixed">
    <parent link="forearm"/>
    <child link="tool"/>
    <origin xyz="0.5 0 0"/>
  </joint>
</robot>
)";
}

/// Six-revolute arm with mesh visuals on two links; ~0.95 m reach.
inline std::string six_dof_urdf() {
  return R"(<?xml version="1.0"?>
<robot name="six_dof">
  <material name="casing"><color rgba="0.35 0.4 0.45 1"/></material>
  <link name="base">
    <visual><geometry><cylinder radius="0.06" length="0.08"/></geometry></visual>
  </link>
  <link name="shoulder_link">
    <visual><geometry><mesh filename="meshes/shoulder.obj"/></geometry></visual>
  </link>
  <link name="upper_arm_link">
    <visual>
      <origin xyz="0.175 0 0"/>
      <geometry><box size="0.35 0.05 0.05"/></geometry>
      <material name="casing"/>
    </visual>
  </link>
  <link name="forearm_link">
    <visual>
      <origin xyz="0.15 0 0"/>
      <geometry><box size="0.3 0.04 0.04"/></geometry>
    </visual>
  </link>
  <link name="wrist_1_link">
    <visual><geometry><sphere radius="0.03"/></geometry></visual>
  </link>
  <link name="wrist_2_link">
    <visual><geometry><sphere radius="0.03"/></geometry></visual>
  </link>
  <link name="gripper_link">
    <visual>
      <geometry><mesh filename="package://testpkg/gripper.stl" scale="1 1 1"/></geometry>
    </visual>
  </link>
  <joint name="j1" type="revolute">
    <parent link="base"/>
    <child link="shoulder_link"/>
    <origin xyz="0 0 0.1"/>
    <axis xyz="0 0 1"/>
    <limit lower="-2.9" upper="2.9"/>
  </joint>
  <joint name="j2" type="revolute">
    <parent link="shoulder_link"/>
    <child link="upper_arm_link"/>
    <origin xyz="0 0 0.08"/>
    <axis xyz="0 1 0"/>
    <limit lower="-2.2" upper="2.2"/>
  </joint>
  <joint name="j3" type="revolute">
    <parent link="upper_arm_link"/>
    <child link="forearm_link"/>
    <origin xyz="0.35 0 0"/>
    <axis xyz="0 1 0"/>
    <limit lower="-2.5" upper="2.5"/>
  </joint>
  <joint name="j4" type="revolute">
    <parent link="forearm_link"/>
    <child link="wrist_1_link"/>
    <origin xyz="0.3 0 0"/>
    <axis xyz="0 1 0"/>
    <limit lower="-2.9" upper="2.9"/>
  </joint>
  <joint name="j5" type="revolute">
    <parent link="wrist_1_link"/>
    <child link="wrist_2_link"/>
    <origin xyz="0.08 0 0"/>
    <axis xyz="0 0 1"/>
    <limit lower="-2.9" upper="2.9"/>
  </joint>
  <joint name="j6" type="revolute">
    <parent link="wrist_2_link"/>
    <child link="gripper_link"/>
    <origin xyz="0.07 0 0"/>
    <axis xyz="1 0 0"/>
    <limit lower="-3.1" upper="3.1"/>
  </joint>
</robot>
)";
}

/// The planar arm mounted one meter down +z, so a camera at the root sees
/// it; used by render-pose tests where no external base pose exists.
inline std::string mounted_planar2_urdf() {
  return R"(<?xml version="1.0"?>
<robot name="mounted_planar2">
  <link name="base"/>
  <link name="mount"/>
  <link name="upper_arm">
    <visual>
      <origin xyz="0.25 0 0"/>
      <geometry><box size="0.5 0.04 0.04"/></geometry>
    </visual>
  </link>
  <link name="forearm">
    <visual>
      <origin xyz="0.25 0 0"/>
      <geometry><box size="0.5 0.03 0.03"/></geometry>
    </visual>
  </link>
  <link name="tool"/>
  <joint name="standoff" type="fixed">
    <parent link="base"/>
    <child link="mount"/>
    <origin xyz="0 0 1"/>
  </joint>
  <joint name="shoulder" type="revolute">
    <parent link="mount"/>
    <child link="upper_arm"/>
    <axis xyz="0 0 1"/>
    <limit lower="-3.14159265" upper="3.14159265"/>
  </joint>
  <joint name="elbow" type="revolute">
    <parent link="upper_arm"/>
    <child link="forearm"/>
    <origin xyz="0.5 0 0"/>
    <axis xyz="0 0 1"/>
    <limit lower="-3.14159265" upper="3.14159265"/>
  </joint>
  <joint name="tool_mount" type="fixed">
    <parent link="forearm"/>
    <child link="tool"/>
    <origin xyz="0.5 0 0"/>
  </joint>
</robot>
)";
}

inline std::string prismatic_urdf() {
  return R"(<robot name="slider">
  <link name="base"/>
  <link name="carriage"/>
  <joint name="lift" type="prismatic">
    <parent link="base"/>
    <child link="carriage"/>
    <axis xyz="0 0 1"/>
    <limit lower="0" upper="0.5"/>
  </joint>
</robot>
)";
}

inline std::string continuous_urdf() {
  return R"(<robot name="spinner">
  <link name="base"/>
  <link name="rotor"/>
  <joint name="spin" type="continuous">
    <parent link="base"/>
    <child link="rotor"/>
    <axis xyz="0 1 0"/>
  </joint>
</robot>
)";
}

inline std::string minimal_urdf() {
  return R"(<robot name="minimal"><link name="only"/></robot>)";
}

inline std::string cyclic_urdf() {
  return R"(<robot name="cyc">
  <link name="base"/>
  <link name="a"/>
  <link name="b"/>
  <joint name="j1" type="fixed"><parent link="base"/><child link="a"/></joint>
  <joint name="j2" type="fixed"><parent link="a"/><child link="b"/></joint>
  <joint name="j3" type="fixed"><parent link="b"/><child link="a"/></joint>
</robot>
)";
}

/// Serial chain with random joint types, origins, and axes; exercises the
/// parser and gives the finite-difference Jacobian oracle varied geometry.
inline std::string random_chain_urdf(std::mt19937& rng, int joints) {
  std::uniform_real_distribution<double> coord(-0.3, 0.3);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  std::uniform_real_distribution<double> pick(0.0, 1.0);
  std::ostringstream out;
  out << std::setprecision(17);
  out << "<robot name=\"chain\">\n  <link name=\"link0\"/>\n";
  for (int i = 1; i <= joints; ++i) {
    out << "  <link name=\"link" << i << "\"/>\n";
  }
  for (int i = 0; i < joints; ++i) {
    const bool prismatic = pick(rng) < 0.3;
    double ax = coord(rng), ay = coord(rng), az = coord(rng);
    if (std::abs(ax) + std::abs(ay) + std::abs(az) < 1e-3) ax = 1.0;
    out << "  <joint name=\"j" << i << "\" type="
        << (prismatic ? "\"prismatic\"" : "\"revolute\"") << ">\n"
        << "    <parent link=\"link" << i << "\"/>\n"
        << "    <child link=\"link" << i + 1 << "\"/>\n"
        << "    <origin xyz=\"" << coord(rng) << " " << coord(rng) << " "
        << coord(rng) << "\" rpy=\"" << angle(rng) << " " << angle(rng) << " "
        << angle(rng) << "\"/>\n"
        << "    <axis xyz=\"" << ax << " " << ay << " " << az << "\"/>\n"
        << "    <limit lower=\"" << (prismatic ? -0.4 : -2.8) << "\" upper=\""
        << (prismatic ? 0.4 : 2.8) << "\"/>\n"
        << "  </joint>\n";
  }
  out << "</robot>\n";
  return out.str();
}

}  // namespace embodiswap::testing
