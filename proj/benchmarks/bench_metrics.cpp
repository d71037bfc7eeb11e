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

#include "probekit/metrics.hpp"
#include "probekit/rng.hpp"

namespace {

using namespace probekit;

metrics::ScoreTable random_table(std::size_t n, std::size_t c, bool multilabel) {
  Rng rng = make_rng(3);
  metrics::ScoreTable t;
  t.scores = Matrix(n, c);
  t.truths = Matrix(n, c);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      t.scores.at(i, j) = next_unit(rng);
    }
    if (multilabel) {
      bool any = false;
      for (std::size_t j = 0; j < c; ++j) {
        if (next_unit(rng) < 0.1) {
          t.truths.at(i, j) = 1.0;
          any = true;
        }
      }
      if (!any) t.truths.at(i, 0) = 1.0;
    } else {
      t.truths.at(i, static_cast<std::size_t>(
                         next_int(rng, 0, static_cast<int>(c) - 1))) = 1.0;
    }
  }
  return t;
}

void BM_Accuracy(benchmark::State& state) {
  const auto t = random_table(static_cast<std::size_t>(state.range(0)), 50, false);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::accuracy(t));
}
BENCHMARK(BM_Accuracy)->Arg(1000)->Arg(10000);

void BM_Map(benchmark::State& state) {
  const auto t = random_table(static_cast<std::size_t>(state.range(0)), 50, true);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::map_score(t));
}
BENCHMARK(BM_Map)->Arg(1000)->Arg(10000);

void BM_Mauc(benchmark::State& state) {
  const auto t = random_table(static_cast<std::size_t>(state.range(0)), 50, true);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::mauc(t));
}
BENCHMARK(BM_Mauc)->Arg(1000)->Arg(10000);

void BM_Lwlrap(benchmark::State& state) {
  const auto t = random_table(static_cast<std::size_t>(state.range(0)), 50, true);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::lwlrap(t));
}
BENCHMARK(BM_Lwlrap)->Arg(1000)->Arg(10000);

void BM_StandardReport(benchmark::State& state) {
  const auto t = random_table(5000, 50, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(metrics::standard_report(t, TaskKind::kMultilabel));
  }
}
BENCHMARK(BM_StandardReport);

}  // namespace

BENCHMARK_MAIN();
