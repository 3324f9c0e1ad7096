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

// End-to-end clip processing: ingest -> retarget -> IK -> render -> blend ->
// labels -> emit, plus bundle validation, configuration, and the dataset
// manifest. File formats are documented in the README; poses are 16 numbers
// row-major everywhere.
//
// The whole pipeline is a pure function of (inputs, config): reruns produce
// byte-identical outputs, regardless of the parallelism degree. Frame
// images are written via temp-file-then-rename so interrupted runs leave no
// partial frames.

#pragma once

#include <atomic>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "embodiswap/clips.hpp"
#include "embodiswap/composite.hpp"
#include "embodiswap/image_io.hpp"
#include "embodiswap/json_io.hpp"
#include "embodiswap/kinematics.hpp"
#include "embodiswap/labels.hpp"
#include "embodiswap/mesh.hpp"
#include "embodiswap/render.hpp"
#include "embodiswap/retarget.hpp"
#include "embodiswap/urdf.hpp"

namespace embodiswap {

inline constexpr char kToolName[] = "embodiswap";
inline constexpr char kToolVersion[] = "0.1.0";

/// Frames whose IK position residual exceeds this are flagged
/// ik-unreachable: no composite, no labels touching them.
inline constexpr double kIkRejectPos = 5e-3;  // meters

// ---------------------------------------------------------------------------
// Configuration

struct PipelineConfig {
  // Resolved paths (relative entries resolve against the config file's
  // directory) alongside the raw strings as written, which feed the digest.
  std::filesystem::path urdf_path;
  std::string urdf_raw;
  std::string end_effector;
  std::map<std::string, std::string> mesh_roots;      // resolved
  std::map<std::string, std::string> mesh_roots_raw;
  IkParams ik;
  LookaheadPolicy lookahead = LookaheadPolicy::defaults();
  LightParams light;
  double depth_bias = 0.0;
  SE3 base_pose;  // camera-from-robot-root; identity puts the base at the camera
  std::filesystem::path output_dir;
  std::string output_raw;
  int parallelism = 1;
  std::map<std::string, double> joint_seed_overrides;
  std::string mesh_root_env;  // EMBODISWAP_MESH_ROOT fallback, captured once

  static PipelineConfig from_json(const nlohmann::json& doc,
                                  const std::filesystem::path& base_dir);
  static PipelineConfig from_file(const std::filesystem::path& path);

  /// Content-normalized form (defaults materialized, raw path strings):
  /// identical config documents digest identically on any machine.
  nlohmann::ordered_json canonical_json() const;
  std::string digest() const {
    return "fnv1a64:" + detail::hex64(detail::fnv1a64(canonical_json().dump()));
  }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j,
                                std::initializer_list<const char*> allowed,
                                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw Error(Errc::ConfigInvalid,
                  "unknown key '" + where + key + "'");
    }
  }
}

inline double config_number(const nlohmann::json& j, const char* key,
                            double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) {
    throw Error(Errc::ConfigInvalid, std::string(key) + " must be a number");
  }
  return j[key].get<double>();
}

}  // namespace detail

inline PipelineConfig PipelineConfig::from_json(
    const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) {
    throw Error(Errc::ConfigInvalid, "config root must be an object");
  }
  detail::reject_unknown_keys(
      doc,
      {"urdf", "end_effector", "mesh_roots", "ik", "lookahead", "light",
       "depth_bias", "base_pose", "output_dir", "parallelism", "joints"},
      "");

  PipelineConfig cfg;
  auto resolve = [&](const std::string& raw) {
    const std::filesystem::path p(raw);
    return p.is_absolute() ? p : base_dir / p;
  };

  for (const char* required : {"urdf", "end_effector", "output_dir"}) {
    if (!doc.contains(required) || !doc[required].is_string()) {
      throw Error(Errc::ConfigInvalid,
                  std::string("'") + required + "' (string) is required");
    }
  }
  cfg.urdf_raw = doc["urdf"].get<std::string>();
  cfg.urdf_path = resolve(cfg.urdf_raw);
  cfg.end_effector = doc["end_effector"].get<std::string>();
  cfg.output_raw = doc["output_dir"].get<std::string>();
  cfg.output_dir = resolve(cfg.output_raw);

  if (doc.contains("mesh_roots")) {
    if (!doc["mesh_roots"].is_object()) {
      throw Error(Errc::ConfigInvalid, "mesh_roots must be an object");
    }
    for (const auto& [pkg, dir] : doc["mesh_roots"].items()) {
      if (!dir.is_string()) {
        throw Error(Errc::ConfigInvalid,
                    "mesh_roots." + pkg + " must be a string");
      }
      cfg.mesh_roots_raw[pkg] = dir.get<std::string>();
      cfg.mesh_roots[pkg] = resolve(dir.get<std::string>()).string();
    }
  }

  if (doc.contains("ik")) {
    const auto& ik = doc["ik"];
    detail::reject_unknown_keys(
        ik, {"damping", "max_iters", "pos_tol", "rot_tol", "step_scale"},
        "ik.");
    cfg.ik.damping = detail::config_number(ik, "damping", cfg.ik.damping);
    cfg.ik.max_iters = static_cast<int>(
        detail::config_number(ik, "max_iters", cfg.ik.max_iters));
    cfg.ik.pos_tol = detail::config_number(ik, "pos_tol", cfg.ik.pos_tol);
    cfg.ik.rot_tol = detail::config_number(ik, "rot_tol", cfg.ik.rot_tol);
    cfg.ik.step_scale =
        detail::config_number(ik, "step_scale", cfg.ik.step_scale);
  }
  if (!cfg.ik.is_valid()) {
    throw Error(Errc::ConfigInvalid, "ik parameters must all be positive");
  }

  if (doc.contains("lookahead")) {
    if (!doc["lookahead"].is_object()) {
      throw Error(Errc::ConfigInvalid, "lookahead must be an object");
    }
    for (const auto& [action, k] : doc["lookahead"].items()) {
      if (!k.is_number_integer() || k.get<int>() < 1) {
        throw Error(Errc::ConfigInvalid,
                    "lookahead." + action + " must be an integer >= 1");
      }
      cfg.lookahead.per_action[action] = k.get<int>();
    }
  }

  if (doc.contains("light")) {
    const auto& light = doc["light"];
    detail::reject_unknown_keys(light, {"direction", "ambient", "diffuse"},
                                "light.");
    if (light.contains("direction")) {
      cfg.light.direction = vec3_from_json(light["direction"],
                                           "light.direction");
    }
    cfg.light.ambient =
        detail::config_number(light, "ambient", cfg.light.ambient);
    cfg.light.diffuse =
        detail::config_number(light, "diffuse", cfg.light.diffuse);
  }
  if (cfg.light.ambient < 0 || cfg.light.diffuse < 0 ||
      cfg.light.ambient + cfg.light.diffuse > 1.2) {
    throw Error(Errc::ConfigInvalid,
                "light.ambient + light.diffuse must lie in [0, 1.2]");
  }

  cfg.depth_bias = detail::config_number(doc, "depth_bias", 0.0);
  if (cfg.depth_bias < 0) {
    throw Error(Errc::ConfigInvalid, "depth_bias must be >= 0");
  }

  if (doc.contains("base_pose")) {
    try {
      cfg.base_pose = se3_from_json(doc["base_pose"], "base_pose");
    } catch (const Error& e) {
      throw Error(Errc::ConfigInvalid, e.what());
    }
  }

  cfg.parallelism =
      static_cast<int>(detail::config_number(doc, "parallelism", 1));
  if (cfg.parallelism < 1) {
    throw Error(Errc::ConfigInvalid, "parallelism must be >= 1");
  }

  if (doc.contains("joints")) {
    if (!doc["joints"].is_object()) {
      throw Error(Errc::ConfigInvalid, "joints must be an object");
    }
    for (const auto& [name, value] : doc["joints"].items()) {
      if (!value.is_number()) {
        throw Error(Errc::ConfigInvalid,
                    "joints." + name + " must be a number");
      }
      cfg.joint_seed_overrides[name] = value.get<double>();
    }
  }

  if (const char* env = std::getenv("EMBODISWAP_MESH_ROOT")) {
    cfg.mesh_root_env = env;
  }
  return cfg;
}

inline PipelineConfig PipelineConfig::from_file(
    const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(detail::read_file(path));
  } catch (const Error& e) {
    throw Error(Errc::ConfigInvalid, e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigInvalid,
                path.string() + ": " + e.what());
  }
  return from_json(doc, path.parent_path());
}

inline nlohmann::ordered_json PipelineConfig::canonical_json() const {
  nlohmann::ordered_json j;
  j["urdf"] = urdf_raw;
  j["end_effector"] = end_effector;
  j["mesh_roots"] = mesh_roots_raw;
  j["ik"] = {{"damping", ik.damping},
             {"max_iters", ik.max_iters},
             {"pos_tol", ik.pos_tol},
             {"rot_tol", ik.rot_tol},
             {"step_scale", ik.step_scale}};
  j["lookahead"] = lookahead.per_action;
  j["light"] = {{"direction", {light.direction.x, light.direction.y,
                               light.direction.z}},
                {"ambient", light.ambient},
                {"diffuse", light.diffuse}};
  j["depth_bias"] = depth_bias;
  j["base_pose"] = base_pose.to_matrix();
  j["output_dir"] = output_raw;
  j["joints"] = joint_seed_overrides;
  return j;
}

// ---------------------------------------------------------------------------
// Robot assets: parsed URDF plus one prepared mesh per link visual.

struct RobotAssets {
  KinematicModel model;
  std::vector<std::vector<std::shared_ptr<const Mesh>>> link_visual_meshes;
  JointConfig initial_seed;
};

/// package://pkg/rest resolves through mesh_roots, then through
/// $EMBODISWAP_MESH_ROOT/pkg/rest; plain relative names resolve against the
/// URDF's directory.
inline std::filesystem::path resolve_mesh_path(
    const std::string& filename, const std::filesystem::path& urdf_dir,
    const std::map<std::string, std::string>& mesh_roots,
    const std::string& env_root) {
  const std::string pkg_prefix = "package://";
  std::string name = filename;
  if (name.starts_with("file://")) {
    name = name.substr(7);
  }
  if (name.starts_with(pkg_prefix)) {
    const std::string rest = name.substr(pkg_prefix.size());
    const size_t slash = rest.find('/');
    if (slash == std::string::npos) {
      throw Error(Errc::UrdfLoadFailure,
                  "bad package URI '" + filename + "'");
    }
    const std::string pkg = rest.substr(0, slash);
    const std::string path_in_pkg = rest.substr(slash + 1);
    const auto it = mesh_roots.find(pkg);
    if (it != mesh_roots.end()) {
      return std::filesystem::path(it->second) / path_in_pkg;
    }
    if (!env_root.empty()) {
      return std::filesystem::path(env_root) / pkg / path_in_pkg;
    }
    throw Error(Errc::UrdfLoadFailure,
                "no mesh root mapping for package '" + pkg +
                    "' (configure mesh_roots or EMBODISWAP_MESH_ROOT)");
  }
  const std::filesystem::path p(name);
  return p.is_absolute() ? p : urdf_dir / p;
}

inline RobotAssets load_robot_assets(const PipelineConfig& cfg) {
  RobotAssets assets;
  assets.model = load_urdf_file(cfg.urdf_path.string());
  assets.model.set_end_effector(cfg.end_effector);

  const std::filesystem::path urdf_dir = cfg.urdf_path.parent_path();
  assets.link_visual_meshes.resize(assets.model.links.size());
  for (size_t li = 0; li < assets.model.links.size(); ++li) {
    for (const VisualGeometry& vg : assets.model.links[li].visuals) {
      Mesh mesh;
      switch (vg.kind) {
        case VisualGeometry::Kind::Box:
          mesh = make_box(vg.box_size);
          break;
        case VisualGeometry::Kind::Cylinder:
          mesh = make_cylinder(vg.radius, vg.length);
          break;
        case VisualGeometry::Kind::Sphere:
          mesh = make_sphere(vg.radius);
          break;
        case VisualGeometry::Kind::Mesh: {
          const auto path = resolve_mesh_path(vg.mesh_filename, urdf_dir,
                                              cfg.mesh_roots,
                                              cfg.mesh_root_env);
          try {
            mesh = load_mesh(path.string());
          } catch (const Error& e) {
            throw Error(Errc::UrdfLoadFailure,
                        "visual mesh for link '" +
                            assets.model.links[li].name + "': " + e.what());
          }
          if (vg.mesh_scale.x != 1.0 || vg.mesh_scale.y != 1.0 ||
              vg.mesh_scale.z != 1.0) {
            scale_mesh(mesh, vg.mesh_scale);
          }
          break;
        }
      }
      mesh.base_color = vg.color;
      assets.link_visual_meshes[li].push_back(
          std::make_shared<const Mesh>(std::move(mesh)));
    }
  }

  assets.initial_seed = mid_limit_config(assets.model);
  for (const auto& [name, value] : cfg.joint_seed_overrides) {
    bool found = false;
    for (size_t i = 0; i < assets.model.actuated_joints.size(); ++i) {
      const Joint& joint =
          assets.model.joints[assets.model.actuated_joints[i]];
      if (joint.name == name) {
        assets.initial_seed[i] =
            std::clamp(value, joint.limits.lower, joint.limits.upper);
        found = true;
        break;
      }
    }
    if (!found) {
      throw Error(Errc::ConfigInvalid,
                  "joints: '" + name + "' is not an actuated joint");
    }
  }
  return assets;
}

// ---------------------------------------------------------------------------
// Bundle loading and validation

struct CameraRecord {
  CameraIntrinsics intrinsics;
  SE3 world_from_camera;
  double time = 0.0;
};

inline std::string frame_file_name(int index, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06d%s", index, ext);
  return buf;
}

inline std::vector<int> list_frame_indices(
    const std::filesystem::path& frames_dir) {
  std::vector<int> indices;
  if (!std::filesystem::is_directory(frames_dir)) return indices;
  for (const auto& entry : std::filesystem::directory_iterator(frames_dir)) {
    const std::string stem = entry.path().stem().string();
    if (entry.path().extension() != ".png" || stem.size() != 6 ||
        stem.find_first_not_of("0123456789") != std::string::npos) {
      continue;
    }
    indices.push_back(std::stoi(stem));
  }
  std::sort(indices.begin(), indices.end());
  return indices;
}

inline std::map<int, HandKeypoints> load_hands(
    const std::filesystem::path& path) {
  std::map<int, HandKeypoints> out;
  const std::string origin = path.filename().string();
  for_each_jsonl(detail::read_file(path), origin,
                 [&](int line_no, const nlohmann::json& j) {
    const std::string where = origin + ": line " + std::to_string(line_no);
    try {
      const int frame = j.at("frame").get<int>();
      HandKeypoints kp;
      kp.side = hand_side_from_string(j.at("side").get<std::string>());
      const auto& pts = j.at("keypoints");
      if (!pts.is_array() || pts.size() != 21) {
        throw Error(Errc::CorruptFile,
                    where + ": keypoints must be 21 [x,y,z] triples");
      }
      for (size_t i = 0; i < 21; ++i) {
        kp.points[i] = vec3_from_json(pts[i], where);
        if (!kp.points[i].finite()) {
          throw Error(Errc::CorruptFile, where + ": non-finite keypoint");
        }
      }
      if (!out.emplace(frame, kp).second) {
        throw Error(Errc::CorruptFile,
                    where + ": duplicate record for frame " +
                        std::to_string(frame));
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::CorruptFile, where + ": " + e.what());
    }
  });
  return out;
}

inline std::map<int, CameraRecord> load_cameras(
    const std::filesystem::path& path) {
  std::map<int, CameraRecord> out;
  const std::string origin = path.filename().string();
  for_each_jsonl(detail::read_file(path), origin,
                 [&](int line_no, const nlohmann::json& j) {
    const std::string where = origin + ": line " + std::to_string(line_no);
    try {
      const int frame = j.at("frame").get<int>();
      CameraRecord rec;
      const auto& intr = j.at("intrinsics");
      rec.intrinsics.fx = intr.at("fx").get<double>();
      rec.intrinsics.fy = intr.at("fy").get<double>();
      rec.intrinsics.cx = intr.at("cx").get<double>();
      rec.intrinsics.cy = intr.at("cy").get<double>();
      rec.intrinsics.width = intr.at("width").get<int>();
      rec.intrinsics.height = intr.at("height").get<int>();
      rec.world_from_camera = se3_from_json(j.at("world_from_camera"), where);
      rec.time = j.value("time", static_cast<double>(frame));
      if (!rec.intrinsics.is_valid()) {
        throw Error(Errc::CorruptFile, where + ": invalid intrinsics");
      }
      if (!out.emplace(frame, rec).second) {
        throw Error(Errc::CorruptFile,
                    where + ": duplicate record for frame " +
                        std::to_string(frame));
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::CorruptFile, where + ": " + e.what());
    }
  });
  return out;
}

struct ValidationFinding {
  int frame = -1;  // -1 for clip-level findings
  std::string kind;
  std::string detail;
};

struct ValidationReport {
  std::filesystem::path bundle;
  std::vector<ValidationFinding> findings;
  std::optional<ClipSpan> span;
  std::vector<int> frame_indices;  // every frame image found
  int in_span_present = 0;         // frame images inside the sliced span
  bool ok() const { return findings.empty(); }
};

/// Structural validation of a clip bundle. Never throws: every problem
/// becomes a finding. ok() requires the sliced span to be fully covered by
/// decodable frames, depth maps, and per-frame hand/camera records.
inline ValidationReport validate_bundle(const std::filesystem::path& dir) {
  ValidationReport report;
  report.bundle = dir;
  auto add = [&](int frame, const std::string& kind,
                 const std::string& detail) {
    report.findings.push_back({frame, kind, detail});
  };

  if (!std::filesystem::is_directory(dir)) {
    add(-1, "missing-bundle", dir.string() + " is not a directory");
    return report;
  }

  try {
    const auto anns =
        parse_annotations(detail::read_file(dir / "annotation.json"),
                          "annotation.json");
    if (anns.size() != 1) {
      add(-1, "bad-annotation",
          "bundle must carry exactly one annotation, found " +
              std::to_string(anns.size()));
    } else {
      report.span = slice_clip(anns[0]);
    }
  } catch (const Error& e) {
    add(-1, "bad-annotation", e.what());
  }

  report.frame_indices = list_frame_indices(dir / "frames");
  if (report.frame_indices.empty()) {
    add(-1, "missing-frames", "frames/ holds no NNNNNN.png images");
  }

  std::map<int, HandKeypoints> hands;
  std::map<int, CameraRecord> cameras;
  try {
    hands = load_hands(dir / "hands.jsonl");
  } catch (const Error& e) {
    add(-1, "bad-hands", e.what());
  }
  try {
    cameras = load_cameras(dir / "camera.jsonl");
  } catch (const Error& e) {
    add(-1, "bad-cameras", e.what());
  }

  if (!report.span) return report;
  const std::set<int> present(report.frame_indices.begin(),
                              report.frame_indices.end());
  for (const int f : report.frame_indices) {
    if (report.span->contains(f)) ++report.in_span_present;
  }
  // A span with no frames at all is a valid degenerate clip (zero outputs,
  // everything out-of-span). A partially covered span is a gap, which the
  // per-frame checks below flag as hard errors.
  if (report.in_span_present == 0) return report;
  const bool has_masks = std::filesystem::is_directory(dir / "masks");

  for (int f = report.span->start_frame; f < report.span->end_frame; ++f) {
    int width = -1, height = -1;
    if (!present.count(f)) {
      add(f, "missing-frame", "no frames/" + frame_file_name(f, ".png"));
    } else {
      try {
        const PngInfo info =
            peek_png(detail::read_file(dir / "frames" /
                                       frame_file_name(f, ".png")),
                     frame_file_name(f, ".png"));
        width = info.width;
        height = info.height;
      } catch (const Error& e) {
        add(f, "corrupt-frame", e.what());
      }
    }

    const auto depth_path = dir / "depth" / frame_file_name(f, ".pfm");
    if (!std::filesystem::exists(depth_path)) {
      add(f, "missing-depth", "no depth/" + frame_file_name(f, ".pfm"));
    } else {
      try {
        const ImageF32 depth = read_pfm(depth_path);
        if (width >= 0 && (depth.width != width || depth.height != height)) {
          add(f, "corrupt-depth", "depth dimensions do not match the frame");
        }
      } catch (const Error& e) {
        add(f, "corrupt-depth", e.what());
      }
    }

    if (!hands.count(f)) {
      add(f, "missing-hand", "no hands.jsonl record");
    }
    if (!cameras.count(f)) {
      add(f, "missing-camera", "no camera.jsonl record");
    } else if (width >= 0 && (cameras.at(f).intrinsics.width != width ||
                              cameras.at(f).intrinsics.height != height)) {
      add(f, "bad-camera", "intrinsics dimensions do not match the frame");
    }

    if (has_masks) {
      const auto mask_path = dir / "masks" / frame_file_name(f, ".png");
      if (std::filesystem::exists(mask_path)) {
        try {
          const PngInfo info = peek_png(detail::read_file(mask_path),
                                        frame_file_name(f, ".png"));
          if (width >= 0 && (info.width != width || info.height != height)) {
            add(f, "bad-mask", "mask dimensions do not match the frame");
          }
        } catch (const Error& e) {
          add(f, "bad-mask", e.what());
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Per-clip processing

struct ExcludedFrame {
  int frame = 0;
  std::string reason;  // ik-unreachable | degenerate-hand | missing-input
};

struct ClipResult {
  std::string clip_id;
  bool failed = false;
  std::string failure;
  std::string video_id;
  std::string action;
  int span_start = 0;
  int span_end = 0;
  int frames_total = 0;
  int frames_out_of_span = 0;
  int frames_emitted = 0;
  int labels_emitted = 0;
  std::vector<ExcludedFrame> excluded;
  std::vector<std::string> warnings;

  /// Manifest invariant: emitted + excluded + out-of-span == total.
  bool counts_reconcile() const {
    return frames_emitted + static_cast<int>(excluded.size()) +
               frames_out_of_span ==
           frames_total;
  }
};

/// Processes one validated bundle. labels_only skips rendering, blending,
/// and composite output, recomputing retarget/IK/labels alone.
/// Throws BundleInvalid when validation fails; UnknownActionClass when the
/// look-ahead policy lacks the clip's action.
inline ClipResult process_clip(const std::filesystem::path& bundle_dir,
                               const PipelineConfig& cfg,
                               const RobotAssets& assets,
                               bool labels_only = false) {
  ClipResult res;
  res.clip_id = bundle_dir.filename().string();

  const ValidationReport report = validate_bundle(bundle_dir);
  if (!report.ok()) {
    std::string summary = report.findings.front().kind + " (" +
                          report.findings.front().detail + ")";
    if (report.findings.size() > 1) {
      summary += " and " + std::to_string(report.findings.size() - 1) +
                 " more finding(s)";
    }
    throw Error(Errc::BundleInvalid, res.clip_id + ": " + summary);
  }
  const ClipSpan& span = *report.span;
  res.video_id = span.video_id;
  res.action = span.action;
  res.span_start = span.start_frame;
  res.span_end = span.end_frame;
  res.frames_total = static_cast<int>(report.frame_indices.size());
  for (const int f : report.frame_indices) {
    if (!span.contains(f)) ++res.frames_out_of_span;
  }

  const auto hands = load_hands(bundle_dir / "hands.jsonl");
  const auto cameras = load_cameras(bundle_dir / "camera.jsonl");

  const std::filesystem::path clip_out = cfg.output_dir / res.clip_id;
  std::filesystem::create_directories(clip_out);
  if (!labels_only) {
    std::filesystem::create_directories(clip_out / "composites");
  }

  JointConfig seed = assets.initial_seed;
  std::vector<TrajectoryFrame> traj;
  std::set<int> excluded_frames;
  auto exclude = [&](int frame, const char* reason) {
    res.excluded.push_back({frame, reason});
    excluded_frames.insert(frame);
  };

  const int span_begin =
      report.in_span_present > 0 ? span.start_frame : span.end_frame;
  for (int f = span_begin; f < span.end_frame; ++f) {
    const HandKeypoints& hand = hands.at(f);
    const CameraRecord& cam = cameras.at(f);
    TrajectoryFrame tf;
    tf.index = f;
    tf.world_from_camera = cam.world_from_camera;
    tf.timestamp = cam.time;

    // Scene pixels are only needed when compositing; read them first so a
    // frame that cannot be read is excluded before IK ever runs.
    Image8 scene_rgb;
    ImageF32 scene_depth;
    if (!labels_only) {
      try {
        scene_rgb = read_png(bundle_dir / "frames" /
                             frame_file_name(f, ".png"));
        scene_depth = read_pfm(bundle_dir / "depth" /
                               frame_file_name(f, ".pfm"));
      } catch (const Error&) {
        exclude(f, "missing-input");
        traj.push_back(tf);
        continue;
      }
    }

    if (!plausible_hand(hand)) {
      exclude(f, "degenerate-hand");
      traj.push_back(tf);
      continue;
    }
    SE3 gripper_cam;
    try {
      gripper_cam = retarget_pose(hand);
    } catch (const Error&) {
      exclude(f, "degenerate-hand");
      traj.push_back(tf);
      continue;
    }
    tf.gripper_pose_cam = gripper_cam;

    const SE3 target_root = cfg.base_pose.inverse() * gripper_cam;
    const IkResult ik = solve_ik(assets.model, target_root, seed, cfg.ik);
    if (ik.residual_pos > kIkRejectPos) {
      exclude(f, "ik-unreachable");
      traj.push_back(tf);
      continue;
    }
    seed = ik.config;  // temporal seeding for the next frame

    if (!labels_only) {
      RenderScene scene;
      scene.intrinsics = cam.intrinsics;
      scene.light = cfg.light;
      const std::vector<SE3> link_poses =
          forward_kinematics(assets.model, ik.config);
      for (size_t li = 0; li < assets.model.links.size(); ++li) {
        const Link& link = assets.model.links[li];
        for (size_t vi = 0; vi < link.visuals.size(); ++vi) {
          scene.instances.push_back(
              {assets.link_visual_meshes[li][vi],
               cfg.base_pose * link_poses[li] * link.visuals[vi].origin});
        }
      }
      const RgbdRender robot = rasterize(scene);
      SceneFrame scene_frame;
      scene_frame.rgb = std::move(scene_rgb);
      scene_frame.depth = std::move(scene_depth);
      const CompositeFrame comp = blend(scene_frame, robot, cfg.depth_bias);
      write_png(clip_out / "composites" / frame_file_name(f, ".png"),
                comp.rgb);
    }
    ++res.frames_emitted;
    traj.push_back(tf);
  }

  const std::vector<RelPoseLabel> labels =
      label_clip(traj, span.action, cfg.lookahead, excluded_frames);
  const int k = cfg.lookahead.lookahead_for(span.action);
  if (!traj.empty() && span.length() <= k) {
    res.warnings.push_back("no labels: span of " +
                           std::to_string(span.length()) +
                           " frame(s) is not longer than look-ahead k=" +
                           std::to_string(k));
  }
  std::string labels_text;
  for (const RelPoseLabel& label : labels) {
    nlohmann::ordered_json j;
    j["frame"] = label.frame_index;
    j["k"] = label.lookahead_k;
    j["t"] = {label.translation.x, label.translation.y, label.translation.z};
    j["r"] = {label.rotation.x, label.rotation.y, label.rotation.z};
    j["convention"] = kLabelConvention;
    labels_text += j.dump();
    labels_text += '\n';
  }
  detail::write_file_atomic(clip_out / "labels.jsonl", labels_text);
  res.labels_emitted = static_cast<int>(labels.size());
  return res;
}

// ---------------------------------------------------------------------------
// Dataset run

struct DatasetManifest {
  std::string config_digest;
  std::string mode;  // "composite" or "labels"
  std::vector<ClipResult> clips;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["mode"] = mode;
    j["config_digest"] = config_digest;
    j["clips"] = nlohmann::ordered_json::array();
    for (const ClipResult& c : clips) {
      nlohmann::ordered_json e;
      e["clip"] = c.clip_id;
      e["status"] = c.failed ? "failed" : "ok";
      if (c.failed) {
        e["failure"] = c.failure;
      } else {
        e["video_id"] = c.video_id;
        e["action"] = c.action;
        e["span"] = {c.span_start, c.span_end};
        e["frames_total"] = c.frames_total;
        e["frames_out_of_span"] = c.frames_out_of_span;
        e["frames_emitted"] = c.frames_emitted;
        e["labels_emitted"] = c.labels_emitted;
        e["excluded"] = nlohmann::ordered_json::array();
        for (const ExcludedFrame& x : c.excluded) {
          e["excluded"].push_back({{"frame", x.frame}, {"reason", x.reason}});
        }
        if (!c.warnings.empty()) e["warnings"] = c.warnings;
      }
      j["clips"].push_back(std::move(e));
    }
    return j;
  }
};

/// Processes clips with bounded parallelism. A failing clip is isolated:
/// its manifest entry records the failure and the other clips complete. The
/// manifest lists clips in input order and is written atomically at the
/// end, so reruns are byte-identical whatever the thread interleaving.
inline DatasetManifest run(const PipelineConfig& cfg,
                           const std::vector<std::filesystem::path>& clip_dirs,
                           bool labels_only = false) {
  const RobotAssets assets = load_robot_assets(cfg);

  std::set<std::string> ids;
  for (const auto& dir : clip_dirs) {
    if (!ids.insert(dir.filename().string()).second) {
      throw Error(Errc::ConfigInvalid,
                  "duplicate clip id '" + dir.filename().string() + "'");
    }
  }
  std::filesystem::create_directories(cfg.output_dir);

  std::vector<ClipResult> results(clip_dirs.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= clip_dirs.size()) break;
      try {
        results[i] = process_clip(clip_dirs[i], cfg, assets, labels_only);
      } catch (const std::exception& e) {
        ClipResult failed;
        failed.clip_id = clip_dirs[i].filename().string();
        failed.failed = true;
        failed.failure = e.what();
        results[i] = std::move(failed);
      }
    }
  };
  const int workers =
      std::max(1, std::min<int>(cfg.parallelism,
                                static_cast<int>(clip_dirs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  DatasetManifest manifest;
  manifest.config_digest = cfg.digest();
  manifest.mode = labels_only ? "labels" : "composite";
  manifest.clips = std::move(results);
  detail::write_file_atomic(cfg.output_dir / "manifest.json",
                            manifest.to_json().dump(2) + "\n");
  return manifest;
}

}  // namespace embodiswap
