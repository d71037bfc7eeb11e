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
#include <string>
#include <string_view>
#include <vector>

#include "probekit/numeric.hpp"
#include "probekit/probe.hpp"

namespace probekit::analysis {

// C rows of per-class representation vectors (probe weight rows or encoder
// final-layer rows) with their class names.
struct LabelVectorSet {
  Matrix matrix;  // C x D
  std::vector<std::string> names;  // size C, unique, non-empty

  std::size_t size() const { return matrix.rows; }
  std::size_t dim() const { return matrix.cols; }
  void validate() const;  // throws ShapeError / DomainError / InvalidConfig
};

// Pairwise similarities between two vector sets.
struct SimilarityMatrix {
  Matrix values;  // C_a x C_b, entries in [-1, 1]
  std::vector<std::string> row_names;
  std::vector<std::string> col_names;
  // Input rows with zero norm: their similarities are reported as 0.
  std::vector<bool> row_degenerate;
  std::vector<bool> col_degenerate;

  // CSV with a header row and a leading name column; values at 6 decimals.
  std::string to_csv() const;
};

// One merge tree node. Leaves occupy indices 0..C-1 (heights 0, named);
// internal nodes follow in merge order; the root is the last node.
struct DendrogramNode {
  int left = -1;   // child node indices; -1/-1 for leaves
  int right = -1;
  double height = 0.0;
  std::string name;           // leaf name; empty for internal nodes
  std::size_t min_leaf = 0;   // smallest leaf index in the subtree
  std::size_t n_leaves = 1;   // leaves in the subtree
};

struct Dendrogram {
  std::vector<DendrogramNode> nodes;
  std::vector<std::size_t> leaf_order;  // left-to-right display order
  std::size_t n_leaves = 0;

  int root() const { return nodes.empty() ? -1 : static_cast<int>(nodes.size()) - 1; }

  // Cluster id per leaf (dense ids, numbered by first appearance in leaf
  // index order) when cutting to exactly k clusters. Throws InvalidK unless
  // 1 <= k <= C.
  std::vector<std::size_t> cut_k(std::size_t k) const;

  // Cluster ids after applying every merge with height <= h.
  std::vector<std::size_t> cut_height(double h) const;

  // Nested JSON: leaves {"name", "height"}, internal {"height", "children"}.
  std::string to_json() const;
};

enum class Linkage { kAverage, kSingle, kComplete };
enum class DistanceKind { kCosine, kEuclidean };

std::string_view linkage_name(Linkage l);
Linkage linkage_from_name(std::string_view name);          // throws InvalidConfig
std::string_view distance_name(DistanceKind d);
DistanceKind distance_from_name(std::string_view name);    // throws InvalidConfig

// Rows of W paired with class names; the bias is excluded.
LabelVectorSet extract_label_vectors(const probe::ProbeModel& model);

// Per-dimension z-score across the set's rows (population statistics,
// epsilon-clamped). Throws TooFewRows when C < 2.
LabelVectorSet mv_normalize(const LabelVectorSet& set, double epsilon = 1e-8);

// entries = <a_i, b_j> / (||a_i|| * ||b_j||); zero-norm rows give 0 entries
// and are flagged. Throws DimMismatch.
SimilarityMatrix cosine_matrix(const LabelVectorSet& a, const LabelVectorSet& b);

// Agglomerative clustering (Lance-Williams updates). Distance ties are
// broken by the smallest (min-leaf, min-leaf) cluster pair, so results are
// deterministic. Heights are non-decreasing for these linkages.
Dendrogram agglomerate(const LabelVectorSet& set,
                       Linkage linkage = Linkage::kAverage,
                       DistanceKind distance = DistanceKind::kCosine);

struct TsneConfig {
  double perplexity = 30.0;
  int iterations = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  int exaggeration_iters = 250;
  std::uint64_t seed = 0;
};

// Largest perplexity valid for C rows (just under (C-1)/3), capped at
// `wanted`; used by callers that prefer clamping over rejection.
double clamp_perplexity(double wanted, std::size_t c);

// Row-stochastic conditional affinities P(j|i) with zero diagonal, each row's
// precision binary-searched so its entropy is ln(perplexity). Exposed so the
// entropy contract is directly checkable. Throws TooFewRows (C < 4) and
// InvalidPerplexity (perplexity <= 0 or >= (C-1)/3).
Matrix conditional_affinities(const Matrix& x, double perplexity);

// Symmetrized joint affinities (P + P^T) / (2C); sums to 1.
Matrix joint_affinities(const Matrix& conditional);

// Exact (dense) t-SNE to 2 dimensions with early exaggeration; deterministic
// given cfg.seed. Returns C x 2 coordinates, all finite.
Matrix tsne(const LabelVectorSet& set, const TsneConfig& cfg);

}  // namespace probekit::analysis
