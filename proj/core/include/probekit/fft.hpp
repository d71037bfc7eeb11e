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

#include <cstddef>
#include <span>
#include <vector>

namespace probekit {

// Iterative radix-2 FFT for real frames. Each instance owns its scratch, so
// use one instance per thread; constructing one per clip is cheap at the
// sizes the frontend uses (<= 4096).
class Fft {
 public:
  explicit Fft(std::size_t size);  // size must be a power of two >= 2

  std::size_t size() const { return n_; }
  std::size_t n_bins() const { return n_ / 2 + 1; }

  // Writes |X_k|^2 for k = 0..n/2 into `power` (length n_bins()). The frame
  // is zero-padded when shorter than size().
  void power_spectrum(std::span<const double> frame, std::span<double> power);

 private:
  std::size_t n_;
  std::vector<std::size_t> bit_reversal_;
  std::vector<double> twiddle_cos_;
  std::vector<double> twiddle_sin_;
  std::vector<double> real_;
  std::vector<double> imag_;
};

}  // namespace probekit
