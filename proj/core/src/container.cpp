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

#include "container.hpp"

#include <bit>
#include <fstream>
#include <limits>

#include "probekit/errors.hpp"

namespace probekit::container {
namespace {

void put_u32_le(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
  }
}

void put_u64_le(std::vector<std::byte>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
  }
}

std::uint32_t get_u32_le(const std::byte* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[i])) << (8 * i);
  }
  return v;
}

std::uint64_t get_u64_le(const std::byte* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(std::to_integer<std::uint8_t>(p[i])) << (8 * i);
  }
  return v;
}

}  // namespace

void write_blob(const std::filesystem::path& path, std::string_view magic,
                std::uint32_t version, std::uint32_t dim, std::uint64_t count,
                std::span<const std::byte> payload, std::string_view trailer_json) {
  if (magic.size() != 4) {
    throw FormatError("container magic must be exactly 4 bytes");
  }
  std::vector<std::byte> buffer;
  buffer.reserve(kHeaderBytes + payload.size() + trailer_json.size() + 8);
  for (const char c : magic) {
    buffer.push_back(static_cast<std::byte>(c));
  }
  put_u32_le(buffer, version);
  put_u32_le(buffer, dim);
  put_u64_le(buffer, count);
  buffer.insert(buffer.end(), payload.begin(), payload.end());
  const std::uint64_t trailer_offset = buffer.size();
  for (const char c : trailer_json) {
    buffer.push_back(static_cast<std::byte>(c));
  }
  put_u64_le(buffer, trailer_offset);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out.write(reinterpret_cast<const char*>(buffer.data()),
            static_cast<std::streamsize>(buffer.size()));
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

Blob read_blob(const std::filesystem::path& path, std::string_view expected_magic,
               std::uint32_t expected_version, std::size_t element_size) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::vector<std::byte> bytes;
  {
    in.seekg(0, std::ios::end);
    const std::streamoff size = in.tellg();
    if (size < 0) {
      throw IoError("cannot determine size of '" + path.string() + "'");
    }
    bytes.resize(static_cast<std::size_t>(size));
    in.seekg(0, std::ios::beg);
    in.read(reinterpret_cast<char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!in) {
      throw IoError("failed reading '" + path.string() + "'");
    }
  }

  if (bytes.size() < kHeaderBytes + 8) {
    throw TruncatedFile("'" + path.string() + "' is shorter than a container header");
  }
  for (std::size_t i = 0; i < 4; ++i) {
    if (static_cast<char>(bytes[i]) != expected_magic[i]) {
      throw FormatError("'" + path.string() + "' has the wrong magic bytes");
    }
  }
  Blob blob;
  blob.version = get_u32_le(bytes.data() + 4);
  if (blob.version != expected_version) {
    throw FormatError("'" + path.string() + "' has unsupported version " +
                      std::to_string(blob.version));
  }
  blob.dim = get_u32_le(bytes.data() + 8);
  blob.count = get_u64_le(bytes.data() + 12);

  const std::uint64_t trailer_offset = get_u64_le(bytes.data() + bytes.size() - 8);
  if (trailer_offset < kHeaderBytes || trailer_offset > bytes.size() - 8) {
    throw FormatError("'" + path.string() + "' has an out-of-range trailer offset");
  }
  const std::uint64_t payload_len = trailer_offset - kHeaderBytes;

  // Guard count * dim * element_size against overflow before comparing.
  const std::uint64_t elems_max = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t expected = 0;
  if (blob.dim != 0 && blob.count > elems_max / blob.dim) {
    throw TruncatedFile("'" + path.string() + "' declares more data than it holds");
  }
  expected = blob.count * blob.dim;
  if (element_size != 0 && expected > elems_max / element_size) {
    throw TruncatedFile("'" + path.string() + "' declares more data than it holds");
  }
  expected *= element_size;
  if (expected > payload_len) {
    throw TruncatedFile("'" + path.string() + "' declares " +
                        std::to_string(expected) + " payload bytes but stores " +
                        std::to_string(payload_len));
  }
  if (expected < payload_len) {
    throw FormatError("'" + path.string() + "' has trailing bytes in its payload");
  }

  blob.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(kHeaderBytes),
                      bytes.begin() + static_cast<std::ptrdiff_t>(trailer_offset));
  blob.trailer_json.assign(
      reinterpret_cast<const char*>(bytes.data()) + trailer_offset,
      bytes.size() - 8 - trailer_offset);
  return blob;
}

std::vector<std::byte> bytes_from_f32(std::span<const float> values) {
  std::vector<std::byte> out;
  out.reserve(values.size() * 4);
  for (const float v : values) {
    put_u32_le(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

std::vector<float> f32_from_bytes(std::span<const std::byte> bytes) {
  if (bytes.size() % 4 != 0) {
    throw FormatError("float32 payload length is not a multiple of 4");
  }
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::bit_cast<float>(get_u32_le(bytes.data() + 4 * i));
  }
  return out;
}

std::vector<std::byte> bytes_from_f64(std::span<const double> values) {
  std::vector<std::byte> out;
  out.reserve(values.size() * 8);
  for (const double v : values) {
    put_u64_le(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

std::vector<double> f64_from_bytes(std::span<const std::byte> bytes) {
  if (bytes.size() % 8 != 0) {
    throw FormatError("float64 payload length is not a multiple of 8");
  }
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::bit_cast<double>(get_u64_le(bytes.data() + 8 * i));
  }
  return out;
}

}  // namespace probekit::container
