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

// Therblig sub-action annotations and clip slicing. Sub-actions are
// contact-demarcated, mutually exclusive spans; a manipulation clip runs
// from the first used sub-action (tool grasped) to the end of the last used
// one. Frame spans are half-open [start, end), so touching spans do not
// overlap.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "embodiswap/errors.hpp"
#include "embodiswap/retarget.hpp"

namespace embodiswap {

struct SubAction {
  std::string name;   // Therblig name, treated as an opaque string
  int start_frame = 0;
  int end_frame = 0;
  bool used = true;   // false marks extraneous sub-actions
};

struct TherbligAnnotation {
  std::string video_id;
  std::string action;           // action class, e.g. "open"
  HandSide dominant_hand = HandSide::Right;
  std::vector<SubAction> sub_actions;
};

struct ClipSpan {
  std::string video_id;
  int start_frame = 0;
  int end_frame = 0;  // half-open
  std::string action;
  HandSide dominant_hand = HandSide::Right;

  bool contains(int frame) const {
    return frame >= start_frame && frame < end_frame;
  }
  int length() const { return end_frame - start_frame; }
};

namespace detail {

inline TherbligAnnotation annotation_from_json(const nlohmann::json& j,
                                               const std::string& origin) {
  auto context = [&](size_t idx) {
    return origin + ": sub_actions[" + std::to_string(idx) + "]";
  };
  TherbligAnnotation ann;
  try {
    ann.video_id = j.at("video_id").get<std::string>();
    ann.action = j.at("action").get<std::string>();
    ann.dominant_hand =
        hand_side_from_string(j.at("dominant_hand").get<std::string>());
    for (const auto& s : j.at("sub_actions")) {
      SubAction sub;
      sub.name = s.at("name").get<std::string>();
      sub.start_frame = s.at("start_frame").get<int>();
      sub.end_frame = s.at("end_frame").get<int>();
      sub.used = s.value("used", true);
      ann.sub_actions.push_back(std::move(sub));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::CorruptFile, origin + ": " + e.what());
  }

  for (size_t i = 0; i < ann.sub_actions.size(); ++i) {
    const SubAction& sub = ann.sub_actions[i];
    if (sub.start_frame >= sub.end_frame) {
      throw Error(Errc::UnorderedSpans,
                  context(i) + " '" + sub.name + "': start " +
                      std::to_string(sub.start_frame) + " must precede end " +
                      std::to_string(sub.end_frame));
    }
    if (i > 0) {
      const SubAction& prev = ann.sub_actions[i - 1];
      if (sub.start_frame < prev.start_frame) {
        throw Error(Errc::UnorderedSpans,
                    context(i) + " starts before its predecessor");
      }
      if (sub.start_frame < prev.end_frame) {
        throw Error(Errc::OverlappingSubActions,
                    context(i) + " '" + sub.name + "' [" +
                        std::to_string(sub.start_frame) + "," +
                        std::to_string(sub.end_frame) + ") overlaps '" +
                        prev.name + "' [" + std::to_string(prev.start_frame) +
                        "," + std::to_string(prev.end_frame) + ")");
      }
    }
  }
  return ann;
}

}  // namespace detail

/// Parses an annotation document: either a single annotation object or an
/// array of them. Violations are rejected with the offending record named.
inline std::vector<TherbligAnnotation> parse_annotations(
    const std::string& text, const std::string& origin = "annotations") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::CorruptFile, origin + ": " + e.what());
  }
  std::vector<TherbligAnnotation> out;
  if (doc.is_array()) {
    for (size_t i = 0; i < doc.size(); ++i) {
      out.push_back(detail::annotation_from_json(
          doc[i], origin + "[" + std::to_string(i) + "]"));
    }
  } else {
    out.push_back(detail::annotation_from_json(doc, origin));
  }
  return out;
}

inline nlohmann::ordered_json annotation_to_json(
    const TherbligAnnotation& ann) {
  nlohmann::ordered_json j;
  j["video_id"] = ann.video_id;
  j["action"] = ann.action;
  j["dominant_hand"] = to_string(ann.dominant_hand);
  j["sub_actions"] = nlohmann::ordered_json::array();
  for (const SubAction& sub : ann.sub_actions) {
    j["sub_actions"].push_back({{"name", sub.name},
                                {"start_frame", sub.start_frame},
                                {"end_frame", sub.end_frame},
                                {"used", sub.used}});
  }
  return j;
}

/// Clip span: temporal hull of the used sub-actions. Extraneous sub-actions
/// are excluded from the hull's endpoints, but interior extraneous frames
/// remain inside the span so frame indexing stays contiguous for look-ahead
/// labels.
inline ClipSpan slice_clip(const TherbligAnnotation& ann) {
  int start = -1, end = -1;
  for (const SubAction& sub : ann.sub_actions) {
    if (!sub.used) continue;
    if (start < 0) start = sub.start_frame;
    end = sub.end_frame;
  }
  if (start < 0) {
    throw Error(Errc::NoUsedSubActions,
                "annotation for '" + ann.video_id +
                    "' marks every sub-action extraneous");
  }
  return {ann.video_id, start, end, ann.action, ann.dominant_hand};
}

}  // namespace embodiswap
