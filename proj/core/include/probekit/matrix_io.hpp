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

#pragma once

#include <filesystem>
#include <string>

#include "probekit/numeric.hpp"

namespace probekit::store {

// A frame-by-channel matrix tied to one clip — the on-disk form of
// spectrograms and other frame-level features ("AMAT" container, float32
// payload, rows = frames, cols = channels).
struct FrameMatrix {
  Matrix values;
  int frame_rate = 0;  // frames per second; 0 when not applicable
  std::string clip_id;
};

void write_frame_matrix(const std::filesystem::path& path, const FrameMatrix& m);
FrameMatrix read_frame_matrix(const std::filesystem::path& path);

}  // namespace probekit::store
