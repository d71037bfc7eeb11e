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

#include <vector>

#include "probekit/numeric.hpp"

namespace probekit::pooling {

// T x K frame-level values: channels are embedding dimensions or per-class
// frame probabilities, depending on what is being pooled.
struct FrameSequence {
  Matrix values;
  int frame_rate = 0;

  std::size_t n_frames() const { return values.rows; }
  std::size_t n_channels() const { return values.cols; }
};

// Componentwise arithmetic mean over frames.
std::vector<double> average_pool(const FrameSequence& fs);

// Componentwise maximum over frames.
std::vector<double> max_pool(const FrameSequence& fs);

// Per channel c: y_c = sum_t p_tc^2 / sum_t p_tc, with y_c = 0 when the
// channel is identically zero. Inputs must lie in [0, 1]. Numerator and
// denominator are accumulated with error-free transforms and combined with a
// corrected division, so y_c is the correctly rounded quotient.
std::vector<double> linear_softmax_pool(const FrameSequence& probs);

// Per channel c: y_c = sum_t w_tc * p_tc / sum_t w_tc. Weights must be
// non-negative with a positive column sum (ZeroWeight otherwise).
std::vector<double> attention_pool(const FrameSequence& probs,
                                   const FrameSequence& weights);

}  // namespace probekit::pooling
