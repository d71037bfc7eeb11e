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

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "probekit/dsp.hpp"
#include "probekit/rng.hpp"

namespace {

using namespace probekit;

dsp::AudioClip noise_clip(double seconds, int sample_rate) {
  Rng rng = make_rng(1);
  dsp::AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.id = "bench";
  clip.samples.resize(static_cast<std::size_t>(seconds * sample_rate));
  for (auto& s : clip.samples) s = 0.5 * next_normal(rng);
  return clip;
}

void BM_LogmelOneSecond(benchmark::State& state) {
  const dsp::AudioClip clip = noise_clip(1.0, 16000);
  const dsp::MelConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsp::compute_logmel(clip, cfg));
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()));
}
BENCHMARK(BM_LogmelOneSecond);

void BM_LogmelTenSeconds(benchmark::State& state) {
  const dsp::AudioClip clip = noise_clip(10.0, 16000);
  const dsp::MelConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsp::compute_logmel(clip, cfg));
  }
}
BENCHMARK(BM_LogmelTenSeconds);

void BM_LogmelResampled(benchmark::State& state) {
  // 44.1 kHz input exercises the resampler in front of the analysis chain.
  const dsp::AudioClip clip = noise_clip(1.0, 44100);
  const dsp::MelConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsp::compute_logmel(clip, cfg));
  }
}
BENCHMARK(BM_LogmelResampled);

void BM_SpecAugment(benchmark::State& state) {
  const dsp::AudioClip clip = noise_clip(10.0, 16000);
  const dsp::MelConfig cfg;
  const dsp::LogMelSpectrogram spec = dsp::compute_logmel(clip, cfg);
  dsp::MaskSpec mask;
  mask.n_freq_masks = 2;
  mask.n_time_masks = 2;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsp::spec_augment(spec, mask, seed++));
  }
}
BENCHMARK(BM_SpecAugment);

}  // namespace

BENCHMARK_MAIN();
