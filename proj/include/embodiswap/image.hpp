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

#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace embodiswap {

/// Interleaved 8-bit RGB raster, row-major, top row first.
struct Image8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // 3 * width * height

  static Image8 filled(int w, int h, std::uint8_t r, std::uint8_t g,
                       std::uint8_t b) {
    Image8 img;
    img.width = w;
    img.height = h;
    img.data.resize(static_cast<size_t>(w) * h * 3);
    for (size_t i = 0; i < img.data.size(); i += 3) {
      img.data[i] = r;
      img.data[i + 1] = g;
      img.data[i + 2] = b;
    }
    return img;
  }

  std::uint8_t* px(int x, int y) {
    return data.data() + (static_cast<size_t>(y) * width + x) * 3;
  }
  const std::uint8_t* px(int x, int y) const {
    return data.data() + (static_cast<size_t>(y) * width + x) * 3;
  }
};

/// Single-channel float32 raster (depth in meters), same layout as Image8.
struct ImageF32 {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  static ImageF32 filled(int w, int h, float value) {
    ImageF32 img;
    img.width = w;
    img.height = h;
    img.data.assign(static_cast<size_t>(w) * h, value);
    return img;
  }

  float at(int x, int y) const {
    return data[static_cast<size_t>(y) * width + x];
  }
  float& at(int x, int y) {
    return data[static_cast<size_t>(y) * width + x];
  }
};

/// Single-channel 8-bit raster used for masks (nonzero = set).
struct Mask8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  static Mask8 zeros(int w, int h) {
    Mask8 m;
    m.width = w;
    m.height = h;
    m.data.assign(static_cast<size_t>(w) * h, 0);
    return m;
  }

  bool at(int x, int y) const {
    return data[static_cast<size_t>(y) * width + x] != 0;
  }
  void set(int x, int y, bool v) {
    data[static_cast<size_t>(y) * width + x] = v ? 255 : 0;
  }
  size_t count() const {
    size_t n = 0;
    for (const auto v : data) n += (v != 0);
    return n;
  }
};

inline constexpr float kNoDepth = std::numeric_limits<float>::infinity();

}  // namespace embodiswap
