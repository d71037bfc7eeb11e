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

#include <span>
#include <string>
#include <vector>

namespace probekit::wav {

struct WavData {
  std::vector<double> samples;  // mono; multi-channel input is averaged
  int sample_rate = 0;
  int source_channels = 0;
};

// Reads PCM 16/24/32-bit and IEEE float32 WAV files (plain or extensible).
WavData read(const std::string& path);

void write_pcm16(const std::string& path, std::span<const double> samples,
                 int sample_rate);
void write_float32(const std::string& path, std::span<const double> samples,
                   int sample_rate);

}  // namespace probekit::wav
