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

#include <string>

#include "probekit/analysis.hpp"
#include "probekit/rng.hpp"

namespace {

using namespace probekit;

analysis::LabelVectorSet random_set(std::size_t c, std::size_t d) {
  Rng rng = make_rng(5);
  analysis::LabelVectorSet set;
  set.matrix = Matrix(c, d);
  for (auto& v : set.matrix.data) v = next_normal(rng);
  for (std::size_t i = 0; i < c; ++i) {
    set.names.push_back("label_" + std::to_string(i));
  }
  return set;
}

void BM_CosineMatrix(benchmark::State& state) {
  const auto set = random_set(static_cast<std::size_t>(state.range(0)), 512);
  for (auto _ : state) {
    benchmark::DoNotOptimize(analysis::cosine_matrix(set, set));
  }
}
BENCHMARK(BM_CosineMatrix)->Arg(50)->Arg(200);

void BM_Agglomerate(benchmark::State& state) {
  const auto set = random_set(static_cast<std::size_t>(state.range(0)), 128);
  for (auto _ : state) {
    benchmark::DoNotOptimize(analysis::agglomerate(set));
  }
}
BENCHMARK(BM_Agglomerate)->Arg(50)->Arg(200);

void BM_Tsne(benchmark::State& state) {
  const auto set = random_set(static_cast<std::size_t>(state.range(0)), 128);
  analysis::TsneConfig cfg;
  cfg.perplexity = analysis::clamp_perplexity(30.0, set.size());
  cfg.iterations = 250;
  for (auto _ : state) {
    benchmark::DoNotOptimize(analysis::tsne(set, cfg));
  }
}
BENCHMARK(BM_Tsne)->Arg(50)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
