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

#include "probekit/matrix_io.hpp"

#include <cstdint>
#include <limits>

#include <nlohmann/json.hpp>

#include "container.hpp"
#include "probekit/errors.hpp"

namespace probekit::store {

namespace {
constexpr std::string_view kMagic = "AMAT";
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_frame_matrix(const std::filesystem::path& path, const FrameMatrix& m) {
  if (m.values.cols > std::numeric_limits<std::uint32_t>::max()) {
    throw ShapeError("matrix has too many columns to serialize");
  }
  if (m.frame_rate < 0) {
    throw InvalidConfig("frame_rate must be >= 0");
  }
  std::vector<float> payload(m.values.data.size());
  for (std::size_t i = 0; i < payload.size(); ++i) {
    payload[i] = static_cast<float>(m.values.data[i]);
  }
  nlohmann::json trailer;
  trailer["clip_id"] = m.clip_id;
  trailer["frame_rate"] = m.frame_rate;
  container::write_blob(path, kMagic, kVersion,
                        static_cast<std::uint32_t>(m.values.cols),
                        static_cast<std::uint64_t>(m.values.rows),
                        container::bytes_from_f32(payload), trailer.dump());
}

FrameMatrix read_frame_matrix(const std::filesystem::path& path) {
  const container::Blob blob = container::read_blob(path, kMagic, kVersion, 4);
  const std::vector<float> payload = container::f32_from_bytes(blob.payload);

  FrameMatrix m;
  m.values = Matrix(static_cast<std::size_t>(blob.count),
                    static_cast<std::size_t>(blob.dim));
  for (std::size_t i = 0; i < payload.size(); ++i) {
    m.values.data[i] = static_cast<double>(payload[i]);
  }

  nlohmann::json trailer;
  try {
    trailer = nlohmann::json::parse(blob.trailer_json);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("'" + path.string() + "' has a malformed trailer: " + e.what());
  }
  if (!trailer.is_object() || !trailer.contains("clip_id") ||
      !trailer["clip_id"].is_string() || !trailer.contains("frame_rate") ||
      !trailer["frame_rate"].is_number_integer()) {
    throw FormatError("'" + path.string() + "' trailer is missing required fields");
  }
  m.clip_id = trailer["clip_id"].get<std::string>();
  m.frame_rate = trailer["frame_rate"].get<int>();
  if (m.frame_rate < 0) {
    throw FormatError("'" + path.string() + "' trailer has a negative frame_rate");
  }
  return m;
}

}  // namespace probekit::store
