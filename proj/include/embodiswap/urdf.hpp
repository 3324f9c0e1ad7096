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

// URDF subset parser: links, joints (revolute/prismatic/fixed, continuous
// mapped to revolute with [-2pi, 2pi] limits), origins as xyz+rpy, axes,
// limits, and visual geometry (mesh/box/cylinder/sphere with material
// color). No collision bodies, dynamics, mimic joints, or closed loops.

#pragma once

#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "embodiswap/detail/xml.hpp"
#include "embodiswap/errors.hpp"
#include "embodiswap/geometry.hpp"

namespace embodiswap {

enum class JointType { Revolute, Prismatic, Fixed };

struct JointLimits {
  double lower = 0.0;
  double upper = 0.0;
};

struct VisualGeometry {
  enum class Kind { Mesh, Box, Cylinder, Sphere };
  Kind kind = Kind::Box;
  SE3 origin;
  std::string mesh_filename;
  Vec3 mesh_scale{1.0, 1.0, 1.0};
  Vec3 box_size;
  double radius = 0.0;
  double length = 0.0;
  std::array<double, 3> color{0.62, 0.62, 0.66};  // linear RGB
};

struct Link {
  std::string name;
  std::vector<VisualGeometry> visuals;
  int parent_joint = -1;  // -1 for the root link
  std::vector<int> child_joints;
};

struct Joint {
  std::string name;
  JointType type = JointType::Fixed;
  int parent_link = -1;
  int child_link = -1;
  SE3 origin;
  Vec3 axis{1.0, 0.0, 0.0};  // unit, child-frame
  JointLimits limits;
  int q_index = -1;  // position in JointConfig; -1 for fixed joints
};

/// Parsed robot description. Immutable after parse; shareable across
/// threads.
struct KinematicModel {
  std::string name;
  std::vector<Link> links;
  std::vector<Joint> joints;
  int root_link = -1;
  int end_effector_link = -1;            // set via set_end_effector
  std::vector<int> actuated_joints;      // joint indices in q order

  size_t dof() const { return actuated_joints.size(); }

  int link_index(std::string_view link_name) const {
    for (size_t i = 0; i < links.size(); ++i) {
      if (links[i].name == link_name) return static_cast<int>(i);
    }
    return -1;
  }

  int require_link(const std::string& link_name) const {
    const int idx = link_index(link_name);
    if (idx < 0) {
      throw Error(Errc::MissingLink, "no link named '" + link_name + "'");
    }
    return idx;
  }

  void set_end_effector(const std::string& link_name) {
    end_effector_link = require_link(link_name);
  }

  /// Leaf links (no children); candidates for a default end effector.
  std::vector<int> leaf_links() const {
    std::vector<int> out;
    for (size_t i = 0; i < links.size(); ++i) {
      if (links[i].child_joints.empty()) out.push_back(static_cast<int>(i));
    }
    return out;
  }
};

namespace detail {

inline std::vector<double> parse_doubles(const std::string& text,
                                         size_t expected, int line,
                                         const std::string& what) {
  std::istringstream in(text);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  std::string rest;
  in.clear();
  in >> rest;
  if (!rest.empty() || out.size() != expected) {
    throw Error(Errc::MalformedXml, "line " + std::to_string(line) + ": " +
                                        what + " expects " +
                                        std::to_string(expected) +
                                        " numbers, got '" + text + "'");
  }
  return out;
}

inline double parse_double(const std::string& text, int line,
                           const std::string& what) {
  return parse_doubles(text, 1, line, what)[0];
}

inline SE3 parse_origin(const XmlNode& element) {
  SE3 t;
  if (const XmlNode* origin = element.child("origin")) {
    if (const std::string* xyz = origin->attr("xyz")) {
      const auto v = parse_doubles(*xyz, 3, origin->line, "origin xyz");
      t.translation = {v[0], v[1], v[2]};
    }
    if (const std::string* rpy = origin->attr("rpy")) {
      const auto v = parse_doubles(*rpy, 3, origin->line, "origin rpy");
      t.rotation = rotation_from_rpy(v[0], v[1], v[2]);
    }
  }
  return t;
}

inline const std::string& require_attr(const XmlNode& node,
                                       std::string_view key) {
  const std::string* v = node.attr(key);
  if (!v) {
    throw Error(Errc::MalformedXml, "line " + std::to_string(node.line) +
                                        ": <" + node.name + "> missing '" +
                                        std::string(key) + "' attribute");
  }
  return *v;
}

}  // namespace detail

/// Parses a URDF document. Throws MalformedXml, UnsupportedJointType,
/// CyclicKinematics, or MissingLink. The end-effector link is not part of
/// the document; set it afterwards with set_end_effector().
inline KinematicModel parse_urdf(std::string_view xml_text) {
  using detail::parse_doubles;
  using detail::parse_origin;
  using detail::require_attr;

  const detail::XmlNode doc = detail::xml_parse(xml_text);
  if (doc.name != "robot") {
    throw Error(Errc::MalformedXml,
                "root element is <" + doc.name + ">, expected <robot>");
  }

  KinematicModel model;
  if (const std::string* n = doc.attr("name")) model.name = *n;

  // Named materials declared at robot scope can be referenced from visuals.
  std::map<std::string, std::array<double, 3>> named_materials;
  auto parse_material = [&](const detail::XmlNode& mat)
      -> std::pair<std::string, std::array<double, 3>> {
    std::string mat_name;
    if (const std::string* n = mat.attr("name")) mat_name = *n;
    std::array<double, 3> rgb{0.62, 0.62, 0.66};
    bool has_color = false;
    if (const detail::XmlNode* color = mat.child("color")) {
      const auto v = parse_doubles(require_attr(*color, "rgba"), 4,
                                   color->line, "color rgba");
      rgb = {v[0], v[1], v[2]};
      has_color = true;
    }
    if (!has_color && !mat_name.empty()) {
      auto it = named_materials.find(mat_name);
      if (it != named_materials.end()) rgb = it->second;
    }
    return {mat_name, rgb};
  };
  for (const detail::XmlNode* mat : doc.children_named("material")) {
    auto [mat_name, rgb] = parse_material(*mat);
    if (!mat_name.empty()) named_materials[mat_name] = rgb;
  }

  for (const detail::XmlNode* link_el : doc.children_named("link")) {
    Link link;
    link.name = require_attr(*link_el, "name");
    if (model.link_index(link.name) >= 0) {
      throw Error(Errc::MalformedXml, "duplicate link '" + link.name + "'");
    }
    for (const detail::XmlNode* visual : link_el->children_named("visual")) {
      VisualGeometry vg;
      vg.origin = parse_origin(*visual);
      const detail::XmlNode* geom = visual->child("geometry");
      if (!geom || geom->children.size() != 1) {
        throw Error(Errc::MalformedXml,
                    "line " + std::to_string(visual->line) +
                        ": <visual> needs exactly one geometry shape");
      }
      const detail::XmlNode& shape = geom->children.front();
      if (shape.name == "mesh") {
        vg.kind = VisualGeometry::Kind::Mesh;
        vg.mesh_filename = require_attr(shape, "filename");
        if (const std::string* scale = shape.attr("scale")) {
          const auto v = parse_doubles(*scale, 3, shape.line, "mesh scale");
          vg.mesh_scale = {v[0], v[1], v[2]};
        }
      } else if (shape.name == "box") {
        vg.kind = VisualGeometry::Kind::Box;
        const auto v =
            parse_doubles(require_attr(shape, "size"), 3, shape.line,
                          "box size");
        vg.box_size = {v[0], v[1], v[2]};
      } else if (shape.name == "cylinder") {
        vg.kind = VisualGeometry::Kind::Cylinder;
        vg.radius = detail::parse_double(require_attr(shape, "radius"),
                                         shape.line, "cylinder radius");
        vg.length = detail::parse_double(require_attr(shape, "length"),
                                         shape.line, "cylinder length");
      } else if (shape.name == "sphere") {
        vg.kind = VisualGeometry::Kind::Sphere;
        vg.radius = detail::parse_double(require_attr(shape, "radius"),
                                         shape.line, "sphere radius");
      } else {
        throw Error(Errc::MalformedXml, "line " + std::to_string(shape.line) +
                                            ": unknown geometry <" +
                                            shape.name + ">");
      }
      if (const detail::XmlNode* mat = visual->child("material")) {
        vg.color = parse_material(*mat).second;
      }
      link.visuals.push_back(std::move(vg));
    }
    model.links.push_back(std::move(link));
  }

  for (const detail::XmlNode* joint_el : doc.children_named("joint")) {
    Joint joint;
    joint.name = require_attr(*joint_el, "name");
    const std::string& type = require_attr(*joint_el, "type");
    bool continuous = false;
    if (type == "revolute") {
      joint.type = JointType::Revolute;
    } else if (type == "continuous") {
      joint.type = JointType::Revolute;
      continuous = true;
    } else if (type == "prismatic") {
      joint.type = JointType::Prismatic;
    } else if (type == "fixed") {
      joint.type = JointType::Fixed;
    } else {
      throw Error(Errc::UnsupportedJointType,
                  "joint '" + joint.name + "' has type '" + type + "'");
    }

    const detail::XmlNode* parent = joint_el->child("parent");
    const detail::XmlNode* child = joint_el->child("child");
    if (!parent || !child) {
      throw Error(Errc::MalformedXml,
                  "joint '" + joint.name + "' missing parent/child");
    }
    joint.parent_link = model.link_index(require_attr(*parent, "link"));
    joint.child_link = model.link_index(require_attr(*child, "link"));
    if (joint.parent_link < 0 || joint.child_link < 0) {
      throw Error(Errc::MissingLink,
                  "joint '" + joint.name + "' references an undefined link");
    }
    if (joint.parent_link == joint.child_link) {
      throw Error(Errc::CyclicKinematics,
                  "joint '" + joint.name + "' connects a link to itself");
    }

    joint.origin = parse_origin(*joint_el);
    if (const detail::XmlNode* axis = joint_el->child("axis")) {
      const auto v = parse_doubles(require_attr(*axis, "xyz"), 3, axis->line,
                                   "axis xyz");
      joint.axis = {v[0], v[1], v[2]};
    }
    if (joint.type != JointType::Fixed) {
      const double n = joint.axis.norm();
      if (!(n > 1e-12)) {
        throw Error(Errc::MalformedXml,
                    "joint '" + joint.name + "' has a zero axis");
      }
      joint.axis = joint.axis / n;

      if (continuous) {
        joint.limits = {-2.0 * std::numbers::pi, 2.0 * std::numbers::pi};
      } else {
        const detail::XmlNode* limit = joint_el->child("limit");
        if (!limit || !limit->attr("lower") || !limit->attr("upper")) {
          throw Error(Errc::MalformedXml, "joint '" + joint.name +
                                              "' missing lower/upper limits");
        }
        joint.limits.lower = detail::parse_double(*limit->attr("lower"),
                                                  limit->line, "limit lower");
        joint.limits.upper = detail::parse_double(*limit->attr("upper"),
                                                  limit->line, "limit upper");
        if (!(joint.limits.lower <= joint.limits.upper)) {
          throw Error(Errc::MalformedXml,
                      "joint '" + joint.name + "' has lower > upper");
        }
      }
      joint.q_index = static_cast<int>(model.actuated_joints.size());
      model.actuated_joints.push_back(static_cast<int>(model.joints.size()));
    }
    model.joints.push_back(std::move(joint));
  }

  // Tree validation: single parent per link, unique root, everything
  // reachable from it.
  for (size_t j = 0; j < model.joints.size(); ++j) {
    Link& child = model.links[model.joints[j].child_link];
    if (child.parent_joint >= 0) {
      throw Error(Errc::CyclicKinematics,
                  "link '" + child.name + "' has multiple parent joints");
    }
    child.parent_joint = static_cast<int>(j);
    model.links[model.joints[j].parent_link].child_joints.push_back(
        static_cast<int>(j));
  }
  if (model.links.empty()) {
    throw Error(Errc::MalformedXml, "URDF declares no links");
  }
  std::vector<int> roots;
  for (size_t i = 0; i < model.links.size(); ++i) {
    if (model.links[i].parent_joint < 0) roots.push_back(static_cast<int>(i));
  }
  if (roots.empty()) {
    throw Error(Errc::CyclicKinematics,
                "every link has a parent; the joint graph contains a cycle");
  }
  if (roots.size() > 1) {
    throw Error(Errc::MalformedXml,
                "kinematic graph is not a single tree (" +
                    std::to_string(roots.size()) + " root links)");
  }
  model.root_link = roots.front();

  std::vector<bool> reached(model.links.size(), false);
  std::deque<int> queue{model.root_link};
  while (!queue.empty()) {
    const int link = queue.front();
    queue.pop_front();
    reached[link] = true;
    for (const int j : model.links[link].child_joints) {
      queue.push_back(model.joints[j].child_link);
    }
  }
  for (size_t i = 0; i < model.links.size(); ++i) {
    if (!reached[i]) {
      throw Error(Errc::CyclicKinematics, "link '" + model.links[i].name +
                                              "' is unreachable from the "
                                              "root; the graph has a cycle");
    }
  }
  return model;
}

/// Reads and parses a URDF file. IO failures raise UrdfLoadFailure; parse
/// failures keep their own codes.
inline KinematicModel load_urdf_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::UrdfLoadFailure, "cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_urdf(buf.str());
}

}  // namespace embodiswap
