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

#include <cmath>
#include <set>
#include <vector>

#include "probekit/dsp.hpp"
#include "probekit/errors.hpp"
#include "probekit/numeric.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace probekit;
using dsp::AudioClip;
using dsp::LogMelSpectrogram;
using dsp::MaskFill;
using dsp::MaskPlan;
using dsp::MaskRect;
using dsp::MaskSpec;
using dsp::MelConfig;

namespace {

AudioClip clip_of(std::vector<double> samples, int rate, std::string id) {
  AudioClip c;
  c.samples = std::move(samples);
  c.sample_rate = rate;
  c.id = std::move(id);
  return c;
}

}  // namespace

TEST_CASE("mel scale anchors and round trip") {
  // Slaney convention: linear with slope 3/200 mel per Hz up to 1 kHz = 15 mel.
  CHECK(dsp::hz_to_mel(0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dsp::hz_to_mel(1000.0) == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(dsp::hz_to_mel(200.0 / 3.0 * 7.0) == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(dsp::mel_to_hz(15.0) == doctest::Approx(1000.0).epsilon(1e-12));
  // One logstep above the knee multiplies frequency by 6.4^(1/27) per mel.
  const double logstep = std::log(6.4) / 27.0;
  CHECK(dsp::mel_to_hz(16.0) == doctest::Approx(1000.0 * std::exp(logstep)).epsilon(1e-12));
  for (double hz : {10.0, 440.0, 999.0, 1000.0, 2345.6, 7999.0}) {
    CHECK(dsp::mel_to_hz(dsp::hz_to_mel(hz)) == doctest::Approx(hz).epsilon(1e-10));
  }
  // Strictly monotone across the knee.
  double prev = -1.0;
  for (double hz = 0.0; hz <= 8000.0; hz += 50.0) {
    const double mel = dsp::hz_to_mel(hz);
    CHECK(mel > prev);
    prev = mel;
  }
}

TEST_CASE("mel config validation") {
  MelConfig ok;
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.hop_samples() == 400);
  CHECK(ok.window_samples() == 400);
  CHECK(ok.log_floor == doctest::Approx(std::log(1e-10)).epsilon(1e-15));

  MelConfig bad_rate;
  bad_rate.frame_rate = 7;  // does not divide 16000
  CHECK_THROWS_AS(bad_rate.validate(), InvalidConfig);
  bad_rate.frame_rate = 0;
  CHECK_THROWS_AS(bad_rate.validate(), InvalidConfig);

  MelConfig bad_mels;
  bad_mels.n_mels = 0;
  CHECK_THROWS_AS(bad_mels.validate(), InvalidConfig);

  MelConfig bad_fmax;
  bad_fmax.fmax = 9000.0;  // beyond the canonical Nyquist
  CHECK_THROWS_AS(bad_fmax.validate(), InvalidConfig);

  MelConfig bad_fmin;
  bad_fmin.fmin = -1.0;
  CHECK_THROWS_AS(bad_fmin.validate(), InvalidConfig);

  MelConfig inverted;
  inverted.fmin = 4000.0;
  inverted.fmax = 2000.0;
  CHECK_THROWS_AS(inverted.validate(), InvalidConfig);

  MelConfig tiny_window;
  tiny_window.window_length = 1e-6;  // under one sample
  CHECK_THROWS_AS(tiny_window.validate(), InvalidConfig);
}

TEST_CASE("frame count comes from the original duration") {
  MelConfig cfg;

  // 1.0 s at the canonical rate, frame_rate 40 -> exactly 40 frames.
  auto spec = dsp::compute_logmel(
      clip_of(std::vector<double>(16000, 0.0), 16000, "a"), cfg);
  CHECK(spec.n_frames() == 40);
  CHECK(spec.n_mels() == 64);
  CHECK(spec.frame_rate == 40);
  CHECK(spec.clip_id == "a");

  // 1.0 s at 44.1 kHz: the count is ceil(duration * frame_rate) computed from
  // the source length and rate, not from the resampled signal.
  spec = dsp::compute_logmel(
      clip_of(std::vector<double>(44100, 0.0), 44100, "b"), cfg);
  CHECK(spec.n_frames() == 40);

  // One sample short of 1.0 s still ceils to 40 frames.
  spec = dsp::compute_logmel(
      clip_of(std::vector<double>(44099, 0.0), 44100, "c"), cfg);
  CHECK(spec.n_frames() == 40);

  // A single sample is one frame.
  spec = dsp::compute_logmel(clip_of(std::vector<double>(1, 0.0), 44100, "d"), cfg);
  CHECK(spec.n_frames() == 1);

  // 0.5 s at 8 kHz -> 20 frames.
  spec = dsp::compute_logmel(
      clip_of(std::vector<double>(4000, 0.0), 8000, "e"), cfg);
  CHECK(spec.n_frames() == 20);

  // frame_rate 100 vs 40 on the same 1.0 s clip.
  MelConfig fast = cfg;
  fast.frame_rate = 100;
  spec = dsp::compute_logmel(
      clip_of(std::vector<double>(16000, 0.0), 16000, "f"), fast);
  CHECK(spec.n_frames() == 100);
}

TEST_CASE("silence produces exactly the log floor") {
  MelConfig cfg;
  const auto spec = dsp::compute_logmel(
      clip_of(std::vector<double>(16000, 0.0), 16000, "silence"), cfg);
  for (const double cell : spec.values.data) {
    CHECK(cell == cfg.log_floor);  // bitwise: zero energy maps straight to floor
  }
}

TEST_CASE("pure tones peak in the matching mel band") {
  MelConfig cfg;
  // Reconstruct the filterbank compute_logmel uses: 400-sample window at
  // 16 kHz -> 512-point FFT -> 257 bins.
  const std::size_t n_fft = next_pow2(static_cast<std::size_t>(cfg.window_samples()));
  dsp::MelFilterbank bank(cfg.n_mels, n_fft, dsp::kCanonicalSampleRate, cfg.fmin,
                          cfg.effective_fmax());
  for (int band : {8, 16, 24, 32, 40, 48, 56}) {
    const double freq = bank.center_hz(band);
    const auto spec = dsp::compute_logmel(
        clip_of(testsupport::make_sine(freq, 1.0, 16000), 16000, "tone"), cfg);
    // Inspect an interior frame, away from onset and zero-padded tail.
    const auto frame = spec.values.row(20);
    std::size_t argmax = 0;
    for (std::size_t m = 1; m < frame.size(); ++m) {
      if (frame[m] > frame[argmax]) argmax = m;
    }
    CHECK(argmax == static_cast<std::size_t>(band));
  }
}

TEST_CASE("tones survive resampling with the same peak band") {
  MelConfig cfg;
  const double freq = 440.0;
  const auto native = dsp::compute_logmel(
      clip_of(testsupport::make_sine(freq, 1.0, 16000), 16000, "n"), cfg);
  const auto resampled = dsp::compute_logmel(
      clip_of(testsupport::make_sine(freq, 1.0, 48000), 48000, "r"), cfg);
  REQUIRE(native.n_frames() == resampled.n_frames());
  const auto a = native.values.row(20);
  const auto b = resampled.values.row(20);
  std::size_t arg_a = 0, arg_b = 0;
  for (std::size_t m = 1; m < a.size(); ++m) {
    if (a[m] > a[arg_a]) arg_a = m;
    if (b[m] > b[arg_b]) arg_b = m;
  }
  CHECK(arg_a == arg_b);
}

TEST_CASE("filterbank triangles match the closed form") {
  const std::size_t n_fft = 512;
  dsp::MelFilterbank bank(64, n_fft, 16000, 0.0, 8000.0);
  REQUIRE(bank.n_bins() == n_fft / 2 + 1);
  const auto& edges = bank.edges_hz();
  REQUIRE(edges.size() == 64 + 2);
  const double bin_hz = 16000.0 / static_cast<double>(n_fft);
  for (int m : {0, 13, 31, 63}) {
    const double left = edges[static_cast<std::size_t>(m)];
    const double center = edges[static_cast<std::size_t>(m) + 1];
    const double right = edges[static_cast<std::size_t>(m) + 2];
    for (std::size_t k = 0; k < bank.n_bins(); ++k) {
      const double f = bin_hz * static_cast<double>(k);
      const double expected = testsupport::triangle_response(f, left, center, right);
      CHECK(bank.weights().at(static_cast<std::size_t>(m), k) ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("frontend input errors") {
  MelConfig cfg;
  CHECK_THROWS_AS(dsp::compute_logmel(clip_of({}, 16000, "x"), cfg), EmptyInput);
  CHECK_THROWS_AS(dsp::compute_logmel(clip_of({0.0, 0.1}, 0, "x"), cfg),
                  InvalidConfig);
  std::vector<double> bad(100, 0.0);
  bad[50] = std::nan("");
  CHECK_THROWS_AS(dsp::compute_logmel(clip_of(bad, 16000, "x"), cfg), DomainError);
}

TEST_CASE("zero mask maxima leave the spectrogram bit-identical") {
  MelConfig cfg;
  const auto spec = dsp::compute_logmel(
      clip_of(testsupport::make_sine(500.0, 2.0, 16000), 16000, "t"), cfg);
  MaskSpec mask;
  mask.max_freq_bins = 0;
  mask.max_time_seconds = 0.0;
  mask.n_freq_masks = 3;
  mask.n_time_masks = 3;
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
    const auto masked = dsp::spec_augment(spec, mask, seed);
    CHECK(masked.values == spec.values);
  }
}

TEST_CASE("mask plans respect bounds and touch only their rectangles") {
  MelConfig cfg;
  const auto spec = dsp::compute_logmel(
      clip_of(testsupport::make_sine(700.0, 2.0, 16000), 16000, "t"), cfg);
  REQUIRE(spec.n_frames() == 80);
  MaskSpec mask;  // defaults: 16 bins, 2.0 s, one mask of each kind
  const std::size_t max_time_frames = static_cast<std::size_t>(
      std::floor(mask.max_time_seconds * spec.frame_rate + 1e-9));

  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const MaskPlan plan = dsp::draw_mask_plan(spec, mask, seed);
    REQUIRE(plan.rects.size() == 2);
    const MaskRect& freq = plan.rects[0];
    const MaskRect& time = plan.rects[1];
    CHECK(freq.f1 - freq.f0 <= 16);
    CHECK(freq.f1 <= spec.n_mels());
    CHECK(freq.t0 == 0);
    CHECK(freq.t1 == spec.n_frames());
    CHECK(time.t1 - time.t0 <= std::min(max_time_frames, spec.n_frames()));
    CHECK(time.t1 <= spec.n_frames());
    CHECK(time.f0 == 0);
    CHECK(time.f1 == spec.n_mels());
    CHECK(plan.fill_value == spec.log_floor);

    const auto masked = dsp::apply_mask_plan(spec, plan);
    for (std::size_t t = 0; t < spec.n_frames(); ++t) {
      for (std::size_t f = 0; f < spec.n_mels(); ++f) {
        const bool in_rect =
            (t >= freq.t0 && t < freq.t1 && f >= freq.f0 && f < freq.f1) ||
            (t >= time.t0 && t < time.t1 && f >= time.f0 && f < time.f1);
        if (in_rect) {
          CHECK(masked.values.at(t, f) == plan.fill_value);
        } else {
          CHECK(masked.values.at(t, f) == spec.values.at(t, f));  // bitwise
        }
      }
    }
  }
}

TEST_CASE("short time budgets clamp the drawn widths") {
  MelConfig cfg;
  const auto spec = dsp::compute_logmel(
      clip_of(testsupport::make_sine(300.0, 1.0, 16000), 16000, "t"), cfg);
  MaskSpec mask;
  mask.max_time_seconds = 0.5;  // 20 frames at 40 fps
  mask.n_freq_masks = 0;
  bool saw_full_width = false;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const MaskPlan plan = dsp::draw_mask_plan(spec, mask, seed);
    REQUIRE(plan.rects.size() == 1);
    const std::size_t width = plan.rects[0].t1 - plan.rects[0].t0;
    CHECK(width <= 20);
    saw_full_width = saw_full_width || width == 20;
  }
  CHECK(saw_full_width);  // the inclusive maximum is reachable
}

TEST_CASE("augmentation is deterministic in the seed") {
  MelConfig cfg;
  const auto spec = dsp::compute_logmel(
      clip_of(testsupport::make_sine(600.0, 1.5, 16000), 16000, "t"), cfg);
  MaskSpec mask;
  const auto a = dsp::spec_augment(spec, mask, 1234);
  const auto b = dsp::spec_augment(spec, mask, 1234);
  CHECK(a.values == b.values);
  // Different seeds almost always draw different rectangles.
  bool any_difference = false;
  for (std::uint64_t seed = 0; seed < 8 && !any_difference; ++seed) {
    any_difference = !(dsp::spec_augment(spec, mask, seed).values == a.values);
  }
  CHECK(any_difference);
}

TEST_CASE("utterance-mean fill matches a high-precision mean") {
  MelConfig cfg;
  const auto spec = dsp::compute_logmel(
      clip_of(testsupport::make_sine(1500.0, 1.0, 16000), 16000, "t"), cfg);
  MaskSpec mask;
  mask.fill = MaskFill::kUtteranceMean;
  const MaskPlan plan = dsp::draw_mask_plan(spec, mask, 7);
  long double acc = 0.0L;
  for (const double v : spec.values.data) acc += static_cast<long double>(v);
  const double expected =
      static_cast<double>(acc / static_cast<long double>(spec.values.data.size()));
  CHECK(plan.fill_value == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("mask spec validation and rectangle range checks") {
  MaskSpec negative;
  negative.max_freq_bins = -1;
  CHECK_THROWS_AS(negative.validate(), InvalidConfig);
  negative = MaskSpec{};
  negative.n_time_masks = -2;
  CHECK_THROWS_AS(negative.validate(), InvalidConfig);
  negative = MaskSpec{};
  negative.max_time_seconds = -0.5;
  CHECK_THROWS_AS(negative.validate(), InvalidConfig);

  MelConfig cfg;
  const auto spec = dsp::compute_logmel(
      clip_of(std::vector<double>(8000, 0.0), 16000, "t"), cfg);
  MaskPlan plan;
  plan.rects.push_back(MaskRect{0, spec.n_frames() + 1, 0, 1});
  CHECK_THROWS_AS(dsp::apply_mask_plan(spec, plan), ShapeError);
}
