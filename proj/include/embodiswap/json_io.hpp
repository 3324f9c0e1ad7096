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

// JSON wire formats shared by bundle files and outputs. Poses travel as 16
// numbers, row-major 4x4, everywhere.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "embodiswap/errors.hpp"
#include "embodiswap/geometry.hpp"

namespace embodiswap {

inline nlohmann::json se3_to_json(const SE3& pose) {
  const auto m = pose.to_matrix();
  return nlohmann::json(m);
}

/// Parses a 16-number row-major pose. Validates the fixed bottom row and,
/// by default, the rotation block's orthonormality.
inline SE3 se3_from_json(const nlohmann::json& j, const std::string& origin,
                         bool validate_rotation = true) {
  if (!j.is_array() || j.size() != 16) {
    throw Error(Errc::CorruptFile,
                origin + ": pose must be 16 numbers (row-major 4x4)");
  }
  std::array<double, 16> m;
  for (size_t i = 0; i < 16; ++i) {
    if (!j[i].is_number()) {
      throw Error(Errc::CorruptFile, origin + ": pose entry " +
                                         std::to_string(i) +
                                         " is not a number");
    }
    m[i] = j[i].get<double>();
  }
  if (m[12] != 0.0 || m[13] != 0.0 || m[14] != 0.0 || m[15] != 1.0) {
    throw Error(Errc::CorruptFile,
                origin + ": pose bottom row must be 0 0 0 1");
  }
  const SE3 pose = SE3::from_matrix(m);
  if (!pose.translation.finite()) {
    throw Error(Errc::CorruptFile, origin + ": non-finite translation");
  }
  if (validate_rotation && !pose.rotation.is_valid(1e-5)) {
    throw Error(Errc::CorruptFile,
                origin + ": rotation block is not orthonormal");
  }
  return pose;
}

inline nlohmann::json vec3_to_json(const Vec3& v) {
  return nlohmann::json::array({v.x, v.y, v.z});
}

inline Vec3 vec3_from_json(const nlohmann::json& j,
                           const std::string& origin) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() ||
      !j[1].is_number() || !j[2].is_number()) {
    throw Error(Errc::CorruptFile, origin + ": expected [x, y, z]");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

/// Parses a JSON-lines document; blank lines are allowed. The callback gets
/// (1-based line number, parsed object).
template <typename Fn>
inline void for_each_jsonl(const std::string& text, const std::string& origin,
                           Fn&& fn) {
  size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    std::string_view line(text.data() + start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::CorruptFile, origin + ": line " +
                                         std::to_string(line_no) + ": " +
                                         e.what());
    }
    fn(line_no, j);
  }
}

namespace detail {

/// FNV-1a 64-bit; used for config digests in manifests.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

}  // namespace detail

}  // namespace embodiswap
