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

#include "probekit/fft.hpp"

#include <cmath>

#include "probekit/errors.hpp"

namespace probekit {

Fft::Fft(std::size_t size) : n_(size) {
  if (n_ < 2 || (n_ & (n_ - 1)) != 0) {
    throw InvalidConfig("FFT size must be a power of two >= 2");
  }
  bit_reversal_.resize(n_);
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n_) ++bits;
  for (std::size_t i = 0; i < n_; ++i) {
    std::size_t reversed = 0;
    for (std::size_t b = 0; b < bits; ++b) {
      if (i & (std::size_t{1} << b)) reversed |= std::size_t{1} << (bits - 1 - b);
    }
    bit_reversal_[i] = reversed;
  }
  twiddle_cos_.resize(n_ / 2);
  twiddle_sin_.resize(n_ / 2);
  for (std::size_t j = 0; j < n_ / 2; ++j) {
    const double angle = -2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n_);
    twiddle_cos_[j] = std::cos(angle);
    twiddle_sin_[j] = std::sin(angle);
  }
  real_.resize(n_);
  imag_.resize(n_);
}

void Fft::power_spectrum(std::span<const double> frame, std::span<double> power) {
  const std::size_t copy = frame.size() < n_ ? frame.size() : n_;
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t src = bit_reversal_[i];
    real_[i] = src < copy ? frame[src] : 0.0;
    imag_[i] = 0.0;
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t stride = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        const double wr = twiddle_cos_[j * stride];
        const double wi = twiddle_sin_[j * stride];
        const std::size_t a = start + j;
        const std::size_t b = a + len / 2;
        const double tr = wr * real_[b] - wi * imag_[b];
        const double ti = wr * imag_[b] + wi * real_[b];
        real_[b] = real_[a] - tr;
        imag_[b] = imag_[a] - ti;
        real_[a] += tr;
        imag_[a] += ti;
      }
    }
  }
  for (std::size_t k = 0; k <= n_ / 2; ++k) {
    power[k] = real_[k] * real_[k] + imag_[k] * imag_[k];
  }
}

}  // namespace probekit
