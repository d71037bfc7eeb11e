/* Copyright 2026 The Probekit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Internal helper for the toolkit's binary container family. Every on-disk
// artifact shares one layout:
//
//   magic   4 bytes (format tag, e.g. "AEMB")
//   version u32 little-endian
//   dim     u32 little-endian (columns / vector dimension)
//   count   u64 little-endian (rows / vector count)
//   payload count * dim elements, little-endian scalars
//   trailer UTF-8 JSON document
//   offset  u64 little-endian byte offset of the trailer, from file start
//
// Not installed; formats expose themselves through the typed read/write
// functions in the public headers.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace probekit::container {

inline constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 8;

struct Blob {
  std::uint32_t version = 0;
  std::uint32_t dim = 0;
  std::uint64_t count = 0;
  std::vector<std::byte> payload;
  std::string trailer_json;
};

// Writes one container file. `payload.size()` must equal
// count * dim * element_size for the format being written.
void write_blob(const std::filesystem::path& path, std::string_view magic,
                std::uint32_t version, std::uint32_t dim, std::uint64_t count,
                std::span<const std::byte> payload, std::string_view trailer_json);

// Reads and validates one container file. Throws FormatError on a magic or
// version mismatch or a malformed layout, TruncatedFile when the declared
// count * dim * element_size exceeds the stored payload, and IoError when
// the file cannot be read.
Blob read_blob(const std::filesystem::path& path, std::string_view expected_magic,
               std::uint32_t expected_version, std::size_t element_size);

// Little-endian scalar <-> byte conversions for container payloads.
std::vector<std::byte> bytes_from_f32(std::span<const float> values);
std::vector<float> f32_from_bytes(std::span<const std::byte> bytes);
std::vector<std::byte> bytes_from_f64(std::span<const double> values);
std::vector<double> f64_from_bytes(std::span<const std::byte> bytes);

}  // namespace probekit::container
