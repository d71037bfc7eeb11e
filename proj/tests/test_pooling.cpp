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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "probekit/errors.hpp"
#include "probekit/pooling.hpp"
#include "probekit/rng.hpp"
#include "support/synth.hpp"

using namespace probekit;
using pooling::FrameSequence;

namespace {

FrameSequence seq(std::size_t rows, std::size_t cols, std::vector<double> values,
                  int frame_rate = 40) {
  FrameSequence fs;
  fs.values = Matrix(rows, cols);
  fs.values.data = std::move(values);
  fs.frame_rate = frame_rate;
  return fs;
}

}  // namespace

TEST_CASE("average and max pooling on a 2x2 block") {
  const FrameSequence fs = seq(2, 2, {1.0, 2.0, 3.0, 4.0});
  const auto avg = pooling::average_pool(fs);
  CHECK(avg[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(avg[1] == doctest::Approx(3.0).epsilon(1e-15));
  const auto mx = pooling::max_pool(fs);
  CHECK(mx[0] == 3.0);
  CHECK(mx[1] == 4.0);
}

TEST_CASE("linear softmax pool hits the exact rational answer") {
  // (0.2^2 + 0.8^2) / (0.2 + 0.8) = 0.68 — and the corrected division makes
  // it the correctly rounded double bit for bit.
  const auto y = pooling::linear_softmax_pool(seq(2, 1, {0.2, 0.8}));
  CHECK(y[0] == 0.68);

  // An identically zero channel pools to zero instead of 0/0.
  const auto z = pooling::linear_softmax_pool(seq(3, 2, {0.0, 0.5, 0.0, 0.5, 0.0, 0.5}));
  CHECK(z[0] == 0.0);
  CHECK(z[1] == 0.5);

  // A one-hot channel scores exactly 1.
  const auto one = pooling::linear_softmax_pool(seq(3, 1, {0.0, 1.0, 0.0}));
  CHECK(one[0] == 1.0);

  // A constant channel is a fixed point: sum p^2 / sum p = p.
  const auto c = pooling::linear_softmax_pool(seq(4, 1, {0.25, 0.25, 0.25, 0.25}));
  CHECK(c[0] == 0.25);
}

TEST_CASE("attention pool worked examples") {
  // (1 * 0.2 + 3 * 0.6) / (1 + 3) = 2.0 / 4 = 0.5 exactly.
  const auto y = pooling::attention_pool(seq(2, 1, {0.2, 0.6}), seq(2, 1, {1.0, 3.0}));
  CHECK(y[0] == 0.5);

  // One-hot weights select that frame's value.
  const auto pick = pooling::attention_pool(seq(3, 2, {0.1, 0.9, 0.5, 0.4, 0.8, 0.2}),
                                            seq(3, 2, {0.0, 0.0, 1.0, 0.0, 0.0, 1.0}));
  CHECK(pick[0] == 0.5);
  CHECK(pick[1] == 0.2);
}

TEST_CASE("uniform attention equals average pooling") {
  Rng rng = make_rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t t = 1 + static_cast<std::size_t>(next_int(rng, 0, 30));
    const std::size_t k = 1 + static_cast<std::size_t>(next_int(rng, 0, 7));
    FrameSequence probs;
    probs.values = Matrix(t, k);
    for (auto& v : probs.values.data) v = next_unit(rng);
    FrameSequence uniform;
    uniform.values = Matrix(t, k, 1.0);
    const auto attn = pooling::attention_pool(probs, uniform);
    const auto avg = pooling::average_pool(probs);
    for (std::size_t c = 0; c < k; ++c) {
      CHECK(attn[c] == doctest::Approx(avg[c]).epsilon(1e-12));
    }
  }
}

TEST_CASE("linear softmax pool is bounded and dominates the mean") {
  Rng rng = make_rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t t = 1 + static_cast<std::size_t>(next_int(rng, 0, 40));
    FrameSequence probs;
    probs.values = Matrix(t, 3);
    for (auto& v : probs.values.data) v = next_unit(rng);
    const auto y = pooling::linear_softmax_pool(probs);
    const auto avg = pooling::average_pool(probs);
    const auto mx = pooling::max_pool(probs);
    for (std::size_t c = 0; c < 3; ++c) {
      double lo = 1.0;
      for (std::size_t r = 0; r < t; ++r) lo = std::min(lo, probs.values.at(r, c));
      CHECK(y[c] >= lo - 1e-12);
      CHECK(y[c] <= mx[c] + 1e-12);
      // E[p^2]/E[p] >= E[p] by Cauchy-Schwarz.
      CHECK(y[c] >= avg[c] - 1e-12);
    }
  }

  // Equality with the mean holds exactly when the channel is constant.
  const auto flat = pooling::linear_softmax_pool(seq(5, 1, {0.3, 0.3, 0.3, 0.3, 0.3}));
  const auto flat_avg = pooling::average_pool(seq(5, 1, {0.3, 0.3, 0.3, 0.3, 0.3}));
  CHECK(flat[0] == doctest::Approx(flat_avg[0]).epsilon(1e-15));
  const auto mixed = pooling::linear_softmax_pool(seq(2, 1, {0.1, 0.9}));
  const auto mixed_avg = pooling::average_pool(seq(2, 1, {0.1, 0.9}));
  CHECK(mixed[0] > mixed_avg[0] + 1e-3);
}

TEST_CASE("pooling is invariant to frame order") {
  Rng rng = make_rng(1234);
  FrameSequence probs;
  probs.values = Matrix(25, 4);
  for (auto& v : probs.values.data) v = next_unit(rng);
  const auto y = pooling::linear_softmax_pool(probs);

  // Reverse the frames.
  FrameSequence reversed;
  reversed.values = Matrix(25, 4);
  for (std::size_t r = 0; r < 25; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      reversed.values.at(r, c) = probs.values.at(24 - r, c);
    }
  }
  const auto yr = pooling::linear_softmax_pool(reversed);
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(yr[c] == doctest::Approx(y[c]).epsilon(1e-12));
  }
}

TEST_CASE("pooling input validation") {
  FrameSequence empty;
  CHECK_THROWS_AS(pooling::average_pool(empty), EmptyInput);
  CHECK_THROWS_AS(pooling::max_pool(empty), EmptyInput);
  CHECK_THROWS_AS(pooling::linear_softmax_pool(empty), EmptyInput);

  CHECK_THROWS_AS(pooling::linear_softmax_pool(seq(2, 1, {0.5, 1.5})), DomainError);
  CHECK_THROWS_AS(pooling::linear_softmax_pool(seq(2, 1, {-0.1, 0.5})), DomainError);
  CHECK_THROWS_AS(pooling::average_pool(seq(1, 1, {std::nan("")})), DomainError);

  // Weight shape must match; weights must be non-negative with positive sums.
  CHECK_THROWS_AS(pooling::attention_pool(seq(2, 1, {0.2, 0.6}), seq(3, 1, {1, 1, 1})),
                  ShapeError);
  CHECK_THROWS_AS(pooling::attention_pool(seq(2, 1, {0.2, 0.6}), seq(2, 1, {1.0, -1.0})),
                  DomainError);
  CHECK_THROWS_AS(pooling::attention_pool(seq(2, 1, {0.2, 0.6}), seq(2, 1, {0.0, 0.0})),
                  ZeroWeight);
}
