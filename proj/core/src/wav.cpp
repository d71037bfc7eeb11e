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

#include "probekit/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "probekit/errors.hpp"

namespace probekit::wav {
namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

std::vector<unsigned char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<unsigned char> bytes(static_cast<std::size_t>(size));
  in.read(reinterpret_cast<char*>(bytes.data()), size);
  if (!in) throw IoError("short read on " + path);
  return bytes;
}

double decode_sample(const unsigned char* p, std::uint16_t format, int bits) {
  if (format == kFormatFloat) {
    float v;
    std::memcpy(&v, p, sizeof(v));
    return static_cast<double>(v);
  }
  switch (bits) {
    case 16: {
      const auto v = static_cast<std::int16_t>(read_u16(p));
      return static_cast<double>(v) / 32768.0;
    }
    case 24: {
      std::int32_t v = p[0] | p[1] << 8 | p[2] << 16;
      if (v & 0x800000) v |= ~0xFFFFFF;  // sign extend
      return static_cast<double>(v) / 8388608.0;
    }
    case 32: {
      std::int32_t v;
      std::memcpy(&v, p, sizeof(v));
      return static_cast<double>(v) / 2147483648.0;
    }
    default:
      throw FormatError("unsupported PCM bit depth " + std::to_string(bits));
  }
}

}  // namespace

WavData read(const std::string& path) {
  const std::vector<unsigned char> bytes = slurp(path);
  if (bytes.size() < 12) throw TruncatedFile(path + ": shorter than a RIFF header");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError(path + ": not a RIFF/WAVE file");
  }

  std::uint16_t format = 0;
  int channels = 0;
  int sample_rate = 0;
  int bits = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t chunk_size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) {
      throw TruncatedFile(path + ": chunk extends past end of file");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw FormatError(path + ": fmt chunk too small");
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      sample_rate = static_cast<int>(read_u32(bytes.data() + body + 4));
      bits = read_u16(bytes.data() + body + 14);
      if (format == kFormatExtensible) {
        if (chunk_size < 40) throw FormatError(path + ": extensible fmt chunk too small");
        format = read_u16(bytes.data() + body + 24);  // first two bytes of the SubFormat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);
  }

  if (!have_fmt) throw FormatError(path + ": missing fmt chunk");
  if (data == nullptr) throw FormatError(path + ": missing data chunk");
  if (channels < 1) throw FormatError(path + ": zero channels");
  if (sample_rate <= 0) throw FormatError(path + ": invalid sample rate");
  if (format != kFormatPcm && format != kFormatFloat) {
    throw FormatError(path + ": unsupported encoding tag " + std::to_string(format));
  }
  if (format == kFormatFloat && bits != 32) {
    throw FormatError(path + ": only 32-bit float is supported");
  }
  const int bytes_per_sample = bits / 8;
  if (bytes_per_sample <= 0) throw FormatError(path + ": invalid bit depth");
  const std::size_t frame_bytes = static_cast<std::size_t>(bytes_per_sample) * channels;
  const std::size_t frames = data_size / frame_bytes;
  if (frames * frame_bytes != data_size) {
    throw TruncatedFile(path + ": data chunk is not a whole number of frames");
  }

  WavData out;
  out.sample_rate = sample_rate;
  out.source_channels = channels;
  out.samples.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      acc += decode_sample(data + f * frame_bytes + static_cast<std::size_t>(c) * bytes_per_sample,
                           format, bits);
    }
    const double v = acc / channels;
    if (!std::isfinite(v)) throw FormatError(path + ": non-finite sample data");
    out.samples[f] = v;
  }
  return out;
}

namespace {

void write_header(std::ofstream& out, std::uint16_t format, int sample_rate, int bits,
                  std::uint32_t data_bytes) {
  const auto u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
  const auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  out.write("RIFF", 4);
  u32(36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  u32(16);
  u16(format);
  u16(1);  // mono
  u32(static_cast<std::uint32_t>(sample_rate));
  u32(static_cast<std::uint32_t>(sample_rate * bits / 8));
  u16(static_cast<std::uint16_t>(bits / 8));
  u16(static_cast<std::uint16_t>(bits));
  out.write("data", 4);
  u32(data_bytes);
}

}  // namespace

void write_pcm16(const std::string& path, std::span<const double> samples, int sample_rate) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_header(out, kFormatPcm, sample_rate, 16, static_cast<std::uint32_t>(samples.size() * 2));
  for (double s : samples) {
    const double clamped = std::clamp(s, -1.0, 32767.0 / 32768.0);
    const auto v = static_cast<std::int16_t>(std::lrint(clamped * 32768.0));
    out.write(reinterpret_cast<const char*>(&v), 2);
  }
  if (!out) throw IoError("short write on " + path);
}

void write_float32(const std::string& path, std::span<const double> samples, int sample_rate) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_header(out, kFormatFloat, sample_rate, 32, static_cast<std::uint32_t>(samples.size() * 4));
  for (double s : samples) {
    const float v = static_cast<float>(s);
    out.write(reinterpret_cast<const char*>(&v), 4);
  }
  if (!out) throw IoError("short write on " + path);
}

}  // namespace probekit::wav
