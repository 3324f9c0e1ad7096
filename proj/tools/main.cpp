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

// embodiswap CLI: turns egocentric clip bundles into robot-composited
// frames and relative-pose labels.
//
// Exit codes: 0 success, 1 validation failures present, 2 configuration
// error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "embodiswap/pipeline.hpp"

namespace {

using namespace embodiswap;

constexpr int kExitOk = 0;
constexpr int kExitValidationFailures = 1;
constexpr int kExitConfigError = 2;

int run_validate(const std::string& bundle) {
  const ValidationReport report = validate_bundle(bundle);
  for (const ValidationFinding& f : report.findings) {
    if (f.frame >= 0) {
      std::printf("frame %06d: %s - %s\n", f.frame, f.kind.c_str(),
                  f.detail.c_str());
    } else {
      std::printf("clip: %s - %s\n", f.kind.c_str(), f.detail.c_str());
    }
  }
  if (report.ok()) {
    std::printf("%s: ok (%zu frames", bundle.c_str(),
                report.frame_indices.size());
    if (report.span) {
      std::printf(", span [%d,%d) action '%s'", report.span->start_frame,
                  report.span->end_frame, report.span->action.c_str());
    }
    std::printf(")\n");
    return kExitOk;
  }
  std::printf("%s: %zu finding(s)\n", bundle.c_str(),
              report.findings.size());
  return kExitValidationFailures;
}

int run_pipeline(const std::string& config_path,
                 const std::vector<std::string>& clips, bool labels_only) {
  PipelineConfig cfg;
  DatasetManifest manifest;
  try {
    cfg = PipelineConfig::from_file(config_path);
    std::vector<std::filesystem::path> dirs(clips.begin(), clips.end());
    manifest = run(cfg, dirs, labels_only);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfigError;
  }

  bool any_failed = false;
  for (const ClipResult& c : manifest.clips) {
    if (c.failed) {
      any_failed = true;
      std::printf("%s: FAILED - %s\n", c.clip_id.c_str(), c.failure.c_str());
    } else {
      std::printf("%s: ok - %d frame(s) emitted, %d label(s), %zu excluded\n",
                  c.clip_id.c_str(), c.frames_emitted, c.labels_emitted,
                  c.excluded.size());
      for (const std::string& w : c.warnings) {
        std::printf("%s: warning - %s\n", c.clip_id.c_str(), w.c_str());
      }
    }
  }
  std::printf("manifest: %s\n",
              (cfg.output_dir / "manifest.json").string().c_str());
  return any_failed ? kExitValidationFailures : kExitOk;
}

int run_render_pose(const std::string& urdf_path,
                    const std::vector<double>& pose_values,
                    const std::string& out_path, std::string ee_link,
                    const std::vector<std::string>& mesh_root_args,
                    const std::vector<double>& intrinsics_values) {
  try {
    PipelineConfig cfg;
    cfg.urdf_path = urdf_path;
    cfg.urdf_raw = urdf_path;
    if (const char* env = std::getenv("EMBODISWAP_MESH_ROOT")) {
      cfg.mesh_root_env = env;
    }
    for (const std::string& arg : mesh_root_args) {
      const size_t eq = arg.find('=');
      if (eq == std::string::npos) {
        throw Error(Errc::ConfigInvalid,
                    "--mesh-root expects pkg=dir, got '" + arg + "'");
      }
      cfg.mesh_roots[arg.substr(0, eq)] = arg.substr(eq + 1);
    }

    if (ee_link.empty()) {
      const KinematicModel probe = load_urdf_file(urdf_path);
      ee_link = probe.links[probe.leaf_links().back()].name;
      std::printf("end effector not specified; using leaf link '%s'\n",
                  ee_link.c_str());
    }
    cfg.end_effector = ee_link;
    const RobotAssets assets = load_robot_assets(cfg);

    std::array<double, 16> m;
    std::copy(pose_values.begin(), pose_values.end(), m.begin());
    const SE3 target = SE3::from_matrix(m);
    if (!target.is_valid(1e-3)) {
      throw Error(Errc::ConfigInvalid,
                  "--pose rotation block is not orthonormal");
    }

    const IkResult ik =
        solve_ik(assets.model, target, assets.initial_seed, IkParams{});
    std::printf("ik: converged=%s iterations=%d residual_pos=%.3g m "
                "residual_rot=%.3g rad\n",
                ik.converged ? "yes" : "no", ik.iterations, ik.residual_pos,
                ik.residual_rot);

    RenderScene scene;
    if (intrinsics_values.empty()) {
      scene.intrinsics = {525.0, 525.0, 319.5, 239.5, 640, 480};
    } else {
      scene.intrinsics = {intrinsics_values[0], intrinsics_values[1],
                          intrinsics_values[2], intrinsics_values[3],
                          static_cast<int>(intrinsics_values[4]),
                          static_cast<int>(intrinsics_values[5])};
    }
    const std::vector<SE3> link_poses =
        forward_kinematics(assets.model, ik.config);
    for (size_t li = 0; li < assets.model.links.size(); ++li) {
      const Link& link = assets.model.links[li];
      for (size_t vi = 0; vi < link.visuals.size(); ++vi) {
        scene.instances.push_back({assets.link_visual_meshes[li][vi],
                                   link_poses[li] * link.visuals[vi].origin});
      }
    }
    const RgbdRender render = rasterize(scene);
    write_png(out_path, render.rgb);
    std::printf("wrote %s (%zu covered pixel(s))\n", out_path.c_str(),
                render.coverage.count());
    return ik.converged ? kExitOk : kExitValidationFailures;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EmbodiSwap robot-compositing data generator"};
  app.require_subcommand(1);

  std::string bundle;
  CLI::App* validate =
      app.add_subcommand("validate", "Check a clip bundle's integrity");
  validate->add_option("bundle", bundle, "Clip bundle directory")->required();

  std::string config_path;
  std::vector<std::string> clips;
  CLI::App* composite = app.add_subcommand(
      "composite", "Composite robot frames and emit labels for clips");
  composite->add_option("--config", config_path, "Pipeline config JSON")
      ->required();
  composite->add_option("--clips", clips, "Clip bundle directories")
      ->required()
      ->expected(-1);

  std::string labels_config;
  std::vector<std::string> labels_clips;
  CLI::App* labels = app.add_subcommand(
      "labels", "Labels-only rerun: retarget + IK + labels, no compositing");
  labels->add_option("--config", labels_config, "Pipeline config JSON")
      ->required();
  labels->add_option("--clips", labels_clips, "Clip bundle directories")
      ->required()
      ->expected(-1);

  std::string urdf_path, out_path, ee_link;
  std::vector<double> pose_values, intrinsics_values;
  std::vector<std::string> mesh_root_args;
  CLI::App* render_pose = app.add_subcommand(
      "render-pose", "Debug render of the robot IK-posed at a target");
  render_pose->add_option("--urdf", urdf_path, "Robot URDF")->required();
  render_pose
      ->add_option("--pose", pose_values,
                   "Target pose: 16 numbers, row-major 4x4")
      ->required()
      ->expected(16);
  render_pose->add_option("--out", out_path, "Output PNG")->required();
  render_pose->add_option("--ee", ee_link,
                          "End-effector link (default: last leaf link)");
  render_pose->add_option("--mesh-root", mesh_root_args,
                          "package:// mapping as pkg=dir (repeatable)");
  render_pose->add_option("--intrinsics", intrinsics_values,
                          "fx fy cx cy width height (default 640x480 f=525)")
      ->expected(6);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfigError;
  }

  if (validate->parsed()) return run_validate(bundle);
  if (composite->parsed()) return run_pipeline(config_path, clips, false);
  if (labels->parsed()) return run_pipeline(labels_config, labels_clips, true);
  if (render_pose->parsed()) {
    return run_render_pose(urdf_path, pose_values, out_path, ee_link,
                           mesh_root_args, intrinsics_values);
  }
  return kExitConfigError;
}
