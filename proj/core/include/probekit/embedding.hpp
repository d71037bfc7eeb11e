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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace probekit::store {

// One clip-level feature vector. Components are stored as float32 — the
// exact payload type of the on-disk format, so round-trips are bit-identical
// — while all arithmetic on them happens in double.
struct Embedding {
  std::vector<float> vector;
  std::string clip_id;
  std::string source_tag;

  bool operator==(const Embedding&) const = default;
};

// An ordered collection of same-dimension embeddings with unique clip_ids
// and an id -> position index.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  explicit EmbeddingSet(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::vector<Embedding>& items() const { return items_; }
  const Embedding& at(std::size_t i) const { return items_.at(i); }

  // Returns nullptr when no embedding carries this clip_id.
  const Embedding* find(std::string_view clip_id) const;

  // Appends one embedding. The first insertion into a dimension-0 set fixes
  // the set's dimension. Throws DimMismatch on a length mismatch and
  // InvalidConfig on a duplicate clip_id or an empty vector.
  void add(Embedding e);

  bool operator==(const EmbeddingSet& other) const {
    return dim_ == other.dim_ && items_ == other.items_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<Embedding> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr double kDefaultNormEpsilon = 1e-8;

// Per-dimension population statistics of a training set, with the standard
// deviation clamped from below at epsilon.
struct NormalizationStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  double epsilon = kDefaultNormEpsilon;
  std::uint64_t fitted_on = 0;

  std::size_t dim() const { return mean.size(); }
};

// Fits per-dimension mean and population (divide-by-N) standard deviation on
// the training set; stddev entries are stored as max(stddev, epsilon).
// Throws EmptyInput on an empty set.
NormalizationStats fit_normalizer(const EmbeddingSet& train,
                                  double epsilon = kDefaultNormEpsilon);

// First normalization stage alone: z = (e - mean) / stddev, in double.
std::vector<double> whiten(const NormalizationStats& stats, const Embedding& e);

struct NormalizeOutcome {
  Embedding embedding;
  bool degenerate = false;  // the whitened vector had zero l2 norm
};

// Both stages: z = (e - mean) / stddev, then z / ||z||_2. A zero-norm z maps
// to the zero vector with the degenerate flag set. Throws DimMismatch.
NormalizeOutcome normalize(const NormalizationStats& stats, const Embedding& e);

// Normalizes every member of a set, preserving order, ids, and tags. Clip
// ids of degenerate vectors are appended to *degenerate_ids when given.
EmbeddingSet normalize_set(const NormalizationStats& stats, const EmbeddingSet& in,
                           std::vector<std::string>* degenerate_ids = nullptr);

// Binary embedding format "AEMB": 4-byte magic, u32 version=1, u32 dim,
// u64 count, count x dim little-endian float32, then a UTF-8 JSON trailer
// mapping positions to clip_ids, with the trailer offset as the final u64.
void write_embeddings(const std::filesystem::path& path, const EmbeddingSet& set);
EmbeddingSet read_embeddings(const std::filesystem::path& path);

}  // namespace probekit::store
