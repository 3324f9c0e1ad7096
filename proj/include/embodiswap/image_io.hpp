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

// PNG and PFM raster IO.
//
// PNG writing is implemented here (stored-deflate zlib stream) instead of
// delegating to a compression library: the emitted bytes are then fixed by
// this code alone, and identical pipeline inputs produce identical PNGs on
// any machine. Reading inflates through zlib, which cannot affect output
// determinism.
//
// PFM is the de facto standard: "Pf", dimensions, negative scale for
// little-endian, rows bottom-to-top, float32.

#pragma once

#include <zlib.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "embodiswap/errors.hpp"
#include "embodiswap/image.hpp"

static_assert(std::endian::native == std::endian::little,
              "raster IO assumes a little-endian host");

namespace embodiswap {
namespace detail {

inline std::uint32_t crc32_of(std::uint32_t seed, const std::uint8_t* data,
                              size_t len) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t n = 0; n < 256; ++n) {
      std::uint32_t c = n;
      for (int k = 0; k < 8; ++k) {
        c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      }
      t[n] = c;
    }
    return t;
  }();
  std::uint32_t c = seed ^ 0xFFFFFFFFu;
  for (size_t i = 0; i < len; ++i) {
    c = table[(c ^ data[i]) & 0xFF] ^ (c >> 8);
  }
  return c ^ 0xFFFFFFFFu;
}

inline std::uint32_t adler32_of(const std::uint8_t* data, size_t len) {
  std::uint32_t a = 1, b = 0;
  for (size_t i = 0; i < len; ++i) {
    a = (a + data[i]) % 65521u;
    b = (b + a) % 65521u;
  }
  return (b << 16) | a;
}

inline void put_be32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v >> 24));
  out.push_back(static_cast<char>(v >> 16));
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v));
}

inline std::uint32_t get_be32(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

inline void append_chunk(std::string& out, const char type[4],
                         const std::string& payload) {
  put_be32(out, static_cast<std::uint32_t>(payload.size()));
  std::string body(type, 4);
  body += payload;
  out += body;
  put_be32(out, crc32_of(0, reinterpret_cast<const std::uint8_t*>(body.data()),
                         body.size()));
}

/// Raw bytes wrapped as a zlib stream of stored (uncompressed) deflate
/// blocks. Byte-exact output regardless of any compression library.
inline std::string zlib_stored(const std::uint8_t* data, size_t len) {
  std::string out;
  out.push_back('\x78');
  out.push_back('\x01');
  size_t off = 0;
  do {
    const size_t block = std::min<size_t>(len - off, 65535);
    const bool final = off + block == len;
    out.push_back(final ? '\x01' : '\x00');
    out.push_back(static_cast<char>(block & 0xFF));
    out.push_back(static_cast<char>(block >> 8));
    out.push_back(static_cast<char>(~block & 0xFF));
    out.push_back(static_cast<char>((~block >> 8) & 0xFF));
    out.append(reinterpret_cast<const char*>(data + off), block);
    off += block;
  } while (off < len);
  put_be32(out, adler32_of(data, len));
  return out;
}

inline std::string zlib_inflate(const std::uint8_t* data, size_t len,
                                size_t expected, const std::string& origin) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) {
    throw Error(Errc::IoError, origin + ": inflateInit failed");
  }
  zs.next_in = const_cast<Bytef*>(data);
  zs.avail_in = static_cast<uInt>(len);
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.total_out != expected) {
    throw Error(Errc::CorruptFile, origin + ": bad compressed image data");
  }
  return out;
}

inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(Errc::IoError, "cannot open '" + tmp.string() + "'");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      throw Error(Errc::IoError, "short write to '" + tmp.string() + "'");
    }
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::IoError, "cannot open '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace detail

inline constexpr char kPngSignature[9] = "\x89PNG\r\n\x1A\n";

/// 8-bit RGB, non-interlaced, filter 0 on every scanline.
inline std::string encode_png(const Image8& img) {
  std::string out(kPngSignature, 8);
  std::string ihdr;
  detail::put_be32(ihdr, static_cast<std::uint32_t>(img.width));
  detail::put_be32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr += '\x08';  // bit depth
  ihdr += '\x02';  // color type: truecolor
  ihdr += '\x00';  // compression
  ihdr += '\x00';  // filter method
  ihdr += '\x00';  // interlace
  detail::append_chunk(out, "IHDR", ihdr);

  const size_t row_bytes = static_cast<size_t>(img.width) * 3;
  std::vector<std::uint8_t> raw((row_bytes + 1) * img.height);
  for (int y = 0; y < img.height; ++y) {
    std::uint8_t* row = raw.data() + (row_bytes + 1) * y;
    row[0] = 0;  // filter: none
    std::memcpy(row + 1, img.data.data() + row_bytes * y, row_bytes);
  }
  detail::append_chunk(out, "IDAT",
                       detail::zlib_stored(raw.data(), raw.size()));
  detail::append_chunk(out, "IEND", "");
  return out;
}

inline void write_png(const std::filesystem::path& path, const Image8& img) {
  detail::write_file_atomic(path, encode_png(img));
}

struct PngInfo {
  int width = 0;
  int height = 0;
  int channels = 0;  // source channel count before RGB conversion
};

namespace detail {

inline int png_channels(int color_type, const std::string& origin) {
  switch (color_type) {
    case 0: return 1;  // gray
    case 2: return 3;  // rgb
    case 4: return 2;  // gray + alpha
    case 6: return 4;  // rgba
    default:
      throw Error(Errc::UnsupportedFormat,
                  origin + ": unsupported PNG color type " +
                      std::to_string(color_type));
  }
}

inline std::uint8_t paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
  if (pb <= pc) return static_cast<std::uint8_t>(b);
  return static_cast<std::uint8_t>(c);
}

}  // namespace detail

/// Parses only the IHDR header; used by bundle validation to check
/// dimensions without decoding pixel data.
inline PngInfo peek_png(const std::string& bytes, const std::string& origin) {
  if (bytes.size() < 33 || std::memcmp(bytes.data(), kPngSignature, 8) != 0) {
    throw Error(Errc::CorruptFile, origin + ": not a PNG file");
  }
  const std::uint8_t* p = reinterpret_cast<const std::uint8_t*>(bytes.data());
  if (detail::get_be32(p + 8) != 13 || std::memcmp(p + 12, "IHDR", 4) != 0) {
    throw Error(Errc::CorruptFile, origin + ": missing IHDR");
  }
  PngInfo info;
  info.width = static_cast<int>(detail::get_be32(p + 16));
  info.height = static_cast<int>(detail::get_be32(p + 20));
  const int bit_depth = p[24];
  const int color_type = p[25];
  const int interlace = p[28];
  if (info.width <= 0 || info.height <= 0) {
    throw Error(Errc::CorruptFile, origin + ": bad dimensions");
  }
  if (bit_depth != 8) {
    throw Error(Errc::UnsupportedFormat,
                origin + ": only 8-bit PNGs are supported");
  }
  if (interlace != 0) {
    throw Error(Errc::UnsupportedFormat,
                origin + ": interlaced PNGs are not supported");
  }
  info.channels = detail::png_channels(color_type, origin);
  return info;
}

/// Full decode to RGB (gray replicated, alpha dropped). Verifies chunk CRCs.
inline Image8 decode_png(const std::string& bytes, const std::string& origin,
                         PngInfo* info_out = nullptr) {
  const PngInfo info = peek_png(bytes, origin);
  const std::uint8_t* p = reinterpret_cast<const std::uint8_t*>(bytes.data());
  const size_t n = bytes.size();

  std::string compressed;
  size_t off = 8;
  bool saw_end = false;
  while (off + 12 <= n) {
    const std::uint32_t len = detail::get_be32(p + off);
    if (off + 12 + len > n) {
      throw Error(Errc::CorruptFile, origin + ": truncated chunk");
    }
    const char* type = reinterpret_cast<const char*>(p + off + 4);
    const std::uint32_t crc = detail::get_be32(p + off + 8 + len);
    if (detail::crc32_of(0, p + off + 4, 4 + len) != crc) {
      throw Error(Errc::CorruptFile, origin + ": chunk CRC mismatch");
    }
    if (std::memcmp(type, "IDAT", 4) == 0) {
      compressed.append(reinterpret_cast<const char*>(p + off + 8), len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      saw_end = true;
      break;
    } else if (std::memcmp(type, "PLTE", 4) == 0) {
      throw Error(Errc::UnsupportedFormat,
                  origin + ": palette PNGs are not supported");
    }
    off += 12 + len;
  }
  if (!saw_end || compressed.empty()) {
    throw Error(Errc::CorruptFile, origin + ": missing IDAT/IEND");
  }

  const size_t row_bytes = static_cast<size_t>(info.width) * info.channels;
  const size_t raw_size = (row_bytes + 1) * info.height;
  std::string raw = detail::zlib_inflate(
      reinterpret_cast<const std::uint8_t*>(compressed.data()),
      compressed.size(), raw_size, origin);

  // Undo per-scanline filters in place.
  std::vector<std::uint8_t> prev_row(row_bytes, 0);
  const int bpp = info.channels;
  Image8 img;
  img.width = info.width;
  img.height = info.height;
  img.data.resize(static_cast<size_t>(info.width) * info.height * 3);
  std::vector<std::uint8_t> row(row_bytes);
  for (int y = 0; y < info.height; ++y) {
    const std::uint8_t* src =
        reinterpret_cast<const std::uint8_t*>(raw.data()) + (row_bytes + 1) * y;
    const int filter = src[0];
    for (size_t i = 0; i < row_bytes; ++i) {
      const int x = src[1 + i];
      const int a = i >= static_cast<size_t>(bpp) ? row[i - bpp] : 0;
      const int b = prev_row[i];
      const int c = i >= static_cast<size_t>(bpp) ? prev_row[i - bpp] : 0;
      int v;
      switch (filter) {
        case 0: v = x; break;
        case 1: v = x + a; break;
        case 2: v = x + b; break;
        case 3: v = x + (a + b) / 2; break;
        case 4: v = x + detail::paeth(a, b, c); break;
        default:
          throw Error(Errc::CorruptFile,
                      origin + ": bad scanline filter " +
                          std::to_string(filter));
      }
      row[i] = static_cast<std::uint8_t>(v & 0xFF);
    }
    for (int x = 0; x < info.width; ++x) {
      const std::uint8_t* s = row.data() + static_cast<size_t>(x) * bpp;
      std::uint8_t* d = img.px(x, y);
      if (bpp <= 2) {
        d[0] = d[1] = d[2] = s[0];
      } else {
        d[0] = s[0];
        d[1] = s[1];
        d[2] = s[2];
      }
    }
    prev_row = row;
  }
  if (info_out) *info_out = info;
  return img;
}

inline Image8 read_png(const std::filesystem::path& path,
                       PngInfo* info_out = nullptr) {
  return decode_png(detail::read_file(path), path.string(), info_out);
}

/// Grayscale PFM, little-endian, meters.
inline std::string encode_pfm(const ImageF32& img) {
  std::string out = "Pf\n" + std::to_string(img.width) + " " +
                    std::to_string(img.height) + "\n-1.0\n";
  // Rows stored bottom-to-top.
  for (int y = img.height - 1; y >= 0; --y) {
    out.append(reinterpret_cast<const char*>(img.data.data() +
                                             static_cast<size_t>(y) *
                                                 img.width),
               static_cast<size_t>(img.width) * 4);
  }
  return out;
}

inline void write_pfm(const std::filesystem::path& path,
                      const ImageF32& img) {
  detail::write_file_atomic(path, encode_pfm(img));
}

inline ImageF32 decode_pfm(const std::string& bytes,
                           const std::string& origin) {
  std::istringstream in(bytes);
  std::string magic;
  int width = 0, height = 0;
  double scale = 0.0;
  if (!(in >> magic >> width >> height >> scale)) {
    throw Error(Errc::CorruptFile, origin + ": bad PFM header");
  }
  if (magic == "PF") {
    throw Error(Errc::UnsupportedFormat,
                origin + ": color PFM not supported, expected grayscale Pf");
  }
  if (magic != "Pf" || width <= 0 || height <= 0) {
    throw Error(Errc::CorruptFile, origin + ": bad PFM header");
  }
  if (scale >= 0.0) {
    throw Error(Errc::UnsupportedFormat,
                origin + ": big-endian PFM not supported");
  }
  const size_t header_end = static_cast<size_t>(in.tellg()) + 1;
  const size_t need = static_cast<size_t>(width) * height * 4;
  if (bytes.size() < header_end + need) {
    throw Error(Errc::CorruptFile, origin + ": truncated PFM data");
  }
  ImageF32 img;
  img.width = width;
  img.height = height;
  img.data.resize(static_cast<size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const char* src =
        bytes.data() + header_end +
        static_cast<size_t>(height - 1 - y) * width * 4;
    std::memcpy(img.data.data() + static_cast<size_t>(y) * width, src,
                static_cast<size_t>(width) * 4);
  }
  return img;
}

inline ImageF32 read_pfm(const std::filesystem::path& path) {
  return decode_pfm(detail::read_file(path), path.string());
}

}  // namespace embodiswap
