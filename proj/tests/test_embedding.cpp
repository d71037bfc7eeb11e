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
#include <cstdint>
#include <fstream>
#include <vector>

#include "probekit/embedding.hpp"
#include "probekit/errors.hpp"
#include "probekit/matrix_io.hpp"
#include "probekit/rng.hpp"
#include "support/synth.hpp"

using namespace probekit;
using store::Embedding;
using store::EmbeddingSet;
using store::NormalizationStats;

namespace {

Embedding emb(std::string id, std::vector<float> v, std::string tag = "") {
  Embedding e;
  e.clip_id = std::move(id);
  e.vector = std::move(v);
  e.source_tag = std::move(tag);
  return e;
}

void put_u32(std::ofstream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

void put_u64(std::ofstream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

}  // namespace

TEST_CASE("embedding set insertion rules") {
  EmbeddingSet set;
  CHECK(set.dim() == 0);
  set.add(emb("a", {1.0f, 2.0f}));
  CHECK(set.dim() == 2);  // first insertion fixes the dimension
  CHECK(set.size() == 1);

  CHECK_THROWS_AS(set.add(emb("b", {1.0f, 2.0f, 3.0f})), DimMismatch);
  CHECK_THROWS_AS(set.add(emb("a", {3.0f, 4.0f})), InvalidConfig);  // duplicate id
  CHECK_THROWS_AS(set.add(emb("c", {})), InvalidConfig);            // no components
  CHECK_THROWS_AS(set.add(emb("d", {1.0f, std::nanf("")})), DomainError);

  set.add(emb("b", {3.0f, 4.0f}, "tagged"));
  REQUIRE(set.find("b") != nullptr);
  CHECK(set.find("b")->source_tag == "tagged");
  CHECK(set.find("missing") == nullptr);
  CHECK(set.at(1).clip_id == "b");
}

TEST_CASE("normalizer statistics on a two-point set") {
  EmbeddingSet set;
  set.add(emb("a", {0.0f, 0.0f}));
  set.add(emb("b", {2.0f, 2.0f}));
  const NormalizationStats stats = store::fit_normalizer(set);
  REQUIRE(stats.dim() == 2);
  CHECK(stats.fitted_on == 2);
  // Population statistics: mean 1, variance ((0-1)^2 + (2-1)^2) / 2 = 1.
  CHECK(stats.mean[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(stats.mean[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(stats.stddev[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(stats.stddev[1] == doctest::Approx(1.0).epsilon(1e-15));

  // Whiten then l2: (0,0) -> (-1,-1) -> (-1/sqrt(2), -1/sqrt(2)).
  const auto outcome = store::normalize(stats, set.at(0));
  CHECK_FALSE(outcome.degenerate);
  const double inv_sqrt2 = -1.0 / std::sqrt(2.0);
  CHECK(outcome.embedding.vector[0] ==
        doctest::Approx(inv_sqrt2).epsilon(1e-7));  // float32 storage
  CHECK(outcome.embedding.vector[1] == doctest::Approx(inv_sqrt2).epsilon(1e-7));
}

TEST_CASE("a single-member set clamps its deviation at epsilon") {
  EmbeddingSet set;
  set.add(emb("solo", {5.0f, -3.0f}));
  const NormalizationStats stats = store::fit_normalizer(set);
  CHECK(stats.mean[0] == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(stats.stddev[0] == store::kDefaultNormEpsilon);
  CHECK(stats.stddev[1] == store::kDefaultNormEpsilon);

  EmbeddingSet empty;
  CHECK_THROWS_AS(store::fit_normalizer(empty), EmptyInput);
  CHECK_THROWS_AS(store::fit_normalizer(set, 0.0), InvalidConfig);
}

TEST_CASE("identity statistics reduce normalization to plain l2") {
  NormalizationStats stats;
  stats.mean = {0.0, 0.0};
  stats.stddev = {1.0, 1.0};

  const auto w = store::whiten(stats, emb("x", {3.0f, 4.0f}));
  CHECK(w[0] == 3.0);
  CHECK(w[1] == 4.0);

  const auto outcome = store::normalize(stats, emb("x", {3.0f, 4.0f}));
  CHECK(outcome.embedding.vector[0] == doctest::Approx(0.6).epsilon(1e-7));
  CHECK(outcome.embedding.vector[1] == doctest::Approx(0.8).epsilon(1e-7));
  CHECK(outcome.embedding.clip_id == "x");

  CHECK_THROWS_AS(store::whiten(stats, emb("bad", {1.0f, 2.0f, 3.0f})), DimMismatch);
}

TEST_CASE("an embedding equal to the mean is degenerate") {
  EmbeddingSet set;
  set.add(emb("a", {1.0f, 2.0f}));
  set.add(emb("b", {3.0f, 6.0f}));
  const NormalizationStats stats = store::fit_normalizer(set);
  const auto outcome = store::normalize(stats, emb("mid", {2.0f, 4.0f}));
  CHECK(outcome.degenerate);
  CHECK(outcome.embedding.vector[0] == 0.0f);
  CHECK(outcome.embedding.vector[1] == 0.0f);

  std::vector<std::string> degenerate_ids;
  EmbeddingSet with_mid;
  with_mid.add(emb("a", {1.0f, 2.0f}));
  with_mid.add(emb("mid", {2.0f, 4.0f}));
  with_mid.add(emb("b", {3.0f, 6.0f}));
  const EmbeddingSet normalized = store::normalize_set(stats, with_mid, &degenerate_ids);
  CHECK(normalized.size() == 3);
  CHECK(normalized.at(0).clip_id == "a");  // order preserved
  REQUIRE(degenerate_ids.size() == 1);
  CHECK(degenerate_ids[0] == "mid");
}

TEST_CASE("whitening centers and scales a random population") {
  Rng rng = make_rng(42);
  EmbeddingSet set;
  for (int i = 0; i < 50; ++i) {
    std::vector<float> v(16);
    for (auto& x : v) {
      x = static_cast<float>(3.0 * next_normal(rng) + 2.5);
    }
    set.add(emb("clip_" + std::to_string(i), std::move(v)));
  }
  const NormalizationStats stats = store::fit_normalizer(set);

  // Whitened population: per-dimension mean ~0 and variance ~1.
  std::vector<double> mean(16, 0.0), sq(16, 0.0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto w = store::whiten(stats, set.at(i));
    for (std::size_t d = 0; d < 16; ++d) {
      mean[d] += w[d];
      sq[d] += w[d] * w[d];
    }
  }
  for (std::size_t d = 0; d < 16; ++d) {
    mean[d] /= 50.0;
    const double var = sq[d] / 50.0 - mean[d] * mean[d];
    CHECK(std::abs(mean[d]) < 1e-9);
    CHECK(std::abs(var - 1.0) < 1e-6);
  }

  // Full normalization: unit norms.
  const EmbeddingSet normalized = store::normalize_set(stats, set);
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    double norm_sq = 0.0;
    for (const float x : normalized.at(i).vector) {
      norm_sq += static_cast<double>(x) * static_cast<double>(x);
    }
    CHECK(std::abs(std::sqrt(norm_sq) - 1.0) < 1e-6);
  }

  // Normalizing an already-normalized set with identity stats is idempotent
  // to within float32 rounding.
  NormalizationStats identity;
  identity.mean.assign(16, 0.0);
  identity.stddev.assign(16, 1.0);
  const EmbeddingSet again = store::normalize_set(identity, normalized);
  for (std::size_t i = 0; i < again.size(); ++i) {
    for (std::size_t d = 0; d < 16; ++d) {
      CHECK(std::abs(again.at(i).vector[d] - normalized.at(i).vector[d]) < 1e-6f);
    }
  }
}

TEST_CASE("embedding container round trip is exact") {
  testsupport::TempDir dir("aemb");
  EmbeddingSet set;
  set.add(emb("first", {1.5f, -2.25f, 0.0f}, "encoder_a"));
  set.add(emb("quote\"and\\slash", {3.0e-38f, 1.0e38f, -0.0f}, ""));
  set.add(emb("第三", {0.1f, 0.2f, 0.3f}, "enc"));

  const auto path = dir.file("set.aemb");
  store::write_embeddings(path, set);
  const EmbeddingSet loaded = store::read_embeddings(path);
  CHECK(loaded == set);  // bit-identical float32 payload, ids, tags
  CHECK(loaded.dim() == 3);
  REQUIRE(loaded.find("quote\"and\\slash") != nullptr);
}

TEST_CASE("container rejects foreign and damaged files") {
  testsupport::TempDir dir("aemb_bad");
  EmbeddingSet set;
  set.add(emb("a", {1.0f, 2.0f}));
  const auto good = dir.file("good.aemb");
  store::write_embeddings(good, set);

  // Flip the magic.
  {
    std::fstream f(good, std::ios::in | std::ios::out | std::ios::binary);
    f.put('X');
  }
  CHECK_THROWS_AS(store::read_embeddings(good), FormatError);

  // Too short to even hold a header.
  const auto stub = dir.file("stub.aemb");
  std::ofstream(stub, std::ios::binary) << "AEMB";
  CHECK_THROWS_AS(store::read_embeddings(stub), TruncatedFile);

  // Header promises 3 x 2 float32 values but the payload holds only 2 x 2.
  const auto short_payload = dir.file("short.aemb");
  {
    std::ofstream f(short_payload, std::ios::binary);
    f << "AEMB";
    put_u32(f, 1);   // version
    put_u32(f, 2);   // dim
    put_u64(f, 3);   // count
    for (int i = 0; i < 4; ++i) put_u32(f, 0x3F800000u);  // 4 floats = 16 bytes
    const std::uint64_t trailer_offset = 20 + 16;
    f << "{}";
    put_u64(f, trailer_offset);
  }
  CHECK_THROWS_AS(store::read_embeddings(short_payload), TruncatedFile);

  // Unsupported version.
  const auto vcrazy = dir.file("version.aemb");
  {
    std::ofstream f(vcrazy, std::ios::binary);
    f << "AEMB";
    put_u32(f, 9);
    put_u32(f, 1);
    put_u64(f, 0);
    const std::uint64_t trailer_offset = 20;
    f << "{\"clip_ids\":[]}";
    put_u64(f, trailer_offset);
  }
  CHECK_THROWS_AS(store::read_embeddings(vcrazy), FormatError);

  // Nonexistent path.
  CHECK_THROWS_AS(store::read_embeddings(dir.file("absent.aemb")), IoError);
}

TEST_CASE("frame matrix container round trip") {
  testsupport::TempDir dir("amat");
  store::FrameMatrix m;
  m.values = Matrix(3, 2);
  // Values exactly representable in float32 survive the payload unchanged.
  m.values.at(0, 0) = 0.25;
  m.values.at(0, 1) = -1.5;
  m.values.at(1, 0) = 1024.0;
  m.values.at(1, 1) = 0.0;
  m.values.at(2, 0) = -0.125;
  m.values.at(2, 1) = 7.0;
  m.frame_rate = 40;
  m.clip_id = "clip with spaces";

  const auto path = dir.file("m.amat");
  store::write_frame_matrix(path, m);
  const store::FrameMatrix loaded = store::read_frame_matrix(path);
  CHECK(loaded.values == m.values);
  CHECK(loaded.frame_rate == 40);
  CHECK(loaded.clip_id == "clip with spaces");

  // An embedding container is not a frame matrix.
  EmbeddingSet set;
  set.add(emb("a", {1.0f}));
  const auto aemb = dir.file("not_amat.aemb");
  store::write_embeddings(aemb, set);
  CHECK_THROWS_AS(store::read_frame_matrix(aemb), FormatError);
}
