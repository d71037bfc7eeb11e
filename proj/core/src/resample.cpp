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

#include "probekit/resample.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>

#include "probekit/errors.hpp"

namespace probekit {
namespace {

// Zero crossings of the sinc kernel retained on each side of the center tap.
constexpr int kZeroCrossings = 12;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Linear-phase low-pass prototype: windowed sinc with cutoff `fc` (as a
// fraction of the upsampled sample rate, so fc <= 0.5) and a symmetric Hann
// window. The returned filter has 2 * half_len + 1 taps, centered.
std::vector<double> design_lowpass(double fc, std::int64_t half_len) {
  std::vector<double> h(static_cast<std::size_t>(2 * half_len + 1));
  for (std::int64_t j = 0; j <= 2 * half_len; ++j) {
    const double t = static_cast<double>(j - half_len);
    const double window =
        0.5 * (1.0 + std::cos(std::numbers::pi * t / static_cast<double>(half_len)));
    h[static_cast<std::size_t>(j)] = 2.0 * fc * sinc(2.0 * fc * t) * window;
  }
  return h;
}

}  // namespace

std::vector<double> resample(std::span<const double> input, int sr_in, int sr_out) {
  if (sr_in <= 0 || sr_out <= 0) {
    throw InvalidConfig("sample rates must be positive");
  }
  if (sr_in == sr_out) {
    return std::vector<double>(input.begin(), input.end());
  }
  if (input.empty()) {
    return {};
  }

  const int g = std::gcd(sr_in, sr_out);
  const std::int64_t up = sr_out / g;    // zero-stuffing factor L
  const std::int64_t down = sr_in / g;   // decimation factor M
  const std::int64_t n = static_cast<std::int64_t>(input.size());
  const std::int64_t out_n = (n * up + down - 1) / down;

  // Cutoff at the narrower of the two Nyquist bands, expressed as a fraction
  // of the upsampled rate sr_in * L.
  const double fc = 0.5 / static_cast<double>(std::max(up, down));
  const std::int64_t half_len = kZeroCrossings * std::max(up, down);
  const std::vector<double> h = design_lowpass(fc, half_len);

  std::vector<double> out(static_cast<std::size_t>(out_n), 0.0);
  const double gain = static_cast<double>(up);
  for (std::int64_t t = 0; t < out_n; ++t) {
    // Center of the kernel on the zero-stuffed grid.
    const std::int64_t u = t * down;
    const std::int64_t m_lo = u - half_len;
    const std::int64_t m_hi = u + half_len;
    // First multiple of `up` at or above m_lo.
    std::int64_t m = m_lo >= 0 ? ((m_lo + up - 1) / up) * up : -((-m_lo) / up) * up;
    double acc = 0.0;
    for (; m <= m_hi; m += up) {
      const std::int64_t i = m / up;
      if (i < 0 || i >= n) continue;
      acc += h[static_cast<std::size_t>(u + half_len - m)] *
             input[static_cast<std::size_t>(i)];
    }
    out[static_cast<std::size_t>(t)] = gain * acc;
  }
  return out;
}

}  // namespace probekit
