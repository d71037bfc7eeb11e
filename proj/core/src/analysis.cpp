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

#include "probekit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <utility>

#include "probekit/errors.hpp"
#include "probekit/metrics.hpp"  // format_fixed6

namespace probekit::analysis {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void LabelVectorSet::validate() const {
  if (matrix.rows == 0 || matrix.cols == 0) {
    throw ShapeError("label vector set must have at least one row and one column");
  }
  if (names.size() != matrix.rows) {
    throw ShapeError("label vector set has " + std::to_string(matrix.rows) +
                     " rows but " + std::to_string(names.size()) + " names");
  }
  if (!matrix.all_finite()) {
    throw DomainError("label vector set contains a non-finite value");
  }
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty()) throw InvalidConfig("label vector names must be non-empty");
    if (!seen.insert(n).second) {
      throw InvalidConfig("duplicate label vector name: " + n);
    }
  }
}

std::string_view linkage_name(Linkage l) {
  switch (l) {
    case Linkage::kAverage: return "average";
    case Linkage::kSingle: return "single";
    case Linkage::kComplete: return "complete";
  }
  return "average";
}

Linkage linkage_from_name(std::string_view name) {
  if (name == "average") return Linkage::kAverage;
  if (name == "single") return Linkage::kSingle;
  if (name == "complete") return Linkage::kComplete;
  throw InvalidConfig("unknown linkage: " + std::string(name) +
                      " (expected average, single, or complete)");
}

std::string_view distance_name(DistanceKind d) {
  switch (d) {
    case DistanceKind::kCosine: return "cosine";
    case DistanceKind::kEuclidean: return "euclidean";
  }
  return "cosine";
}

DistanceKind distance_from_name(std::string_view name) {
  if (name == "cosine") return DistanceKind::kCosine;
  if (name == "euclidean") return DistanceKind::kEuclidean;
  throw InvalidConfig("unknown distance: " + std::string(name) +
                      " (expected cosine or euclidean)");
}

LabelVectorSet extract_label_vectors(const probe::ProbeModel& model) {
  model.validate();
  LabelVectorSet out;
  out.matrix = model.W;
  out.names = model.class_names;
  out.validate();
  return out;
}

LabelVectorSet mv_normalize(const LabelVectorSet& set, double epsilon) {
  set.validate();
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidConfig("mv_normalize epsilon must be positive and finite");
  }
  const std::size_t c = set.matrix.rows;
  const std::size_t d = set.matrix.cols;
  if (c < 2) {
    throw TooFewRows("mv_normalize needs at least 2 rows, got " + std::to_string(c));
  }
  RunningMoments moments(d);
  for (std::size_t i = 0; i < c; ++i) moments.add_row(set.matrix.row(i));
  const std::vector<double> mean = moments.mean();
  const std::vector<double> stddev = moments.stddev(epsilon);

  LabelVectorSet out;
  out.names = set.names;
  out.matrix = Matrix(c, d);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out.matrix.at(i, j) = (set.matrix.at(i, j) - mean[j]) / stddev[j];
    }
  }
  return out;
}

SimilarityMatrix cosine_matrix(const LabelVectorSet& a, const LabelVectorSet& b) {
  a.validate();
  b.validate();
  if (a.matrix.cols != b.matrix.cols) {
    throw DimMismatch("cosine_matrix dimension mismatch: " +
                      std::to_string(a.matrix.cols) + " vs " +
                      std::to_string(b.matrix.cols));
  }
  SimilarityMatrix out;
  out.row_names = a.names;
  out.col_names = b.names;
  out.row_degenerate.assign(a.matrix.rows, false);
  out.col_degenerate.assign(b.matrix.rows, false);

  std::vector<double> norm_a(a.matrix.rows), norm_b(b.matrix.rows);
  for (std::size_t i = 0; i < a.matrix.rows; ++i) {
    norm_a[i] = l2_norm(a.matrix.row(i));
    if (norm_a[i] == 0.0) out.row_degenerate[i] = true;
  }
  for (std::size_t j = 0; j < b.matrix.rows; ++j) {
    norm_b[j] = l2_norm(b.matrix.row(j));
    if (norm_b[j] == 0.0) out.col_degenerate[j] = true;
  }

  out.values = Matrix(a.matrix.rows, b.matrix.rows);
  for (std::size_t i = 0; i < a.matrix.rows; ++i) {
    for (std::size_t j = 0; j < b.matrix.rows; ++j) {
      double v = 0.0;
      if (norm_a[i] > 0.0 && norm_b[j] > 0.0) {
        v = dot(a.matrix.row(i), b.matrix.row(j)) / (norm_a[i] * norm_b[j]);
        // Rounding can push |v| a hair past 1; similarities are defined
        // on [-1, 1].
        v = std::clamp(v, -1.0, 1.0);
      }
      out.values.at(i, j) = v;
    }
  }
  return out;
}

std::string SimilarityMatrix::to_csv() const {
  std::string out;
  for (const auto& n : col_names) {
    out += ',';
    out += csv_field(n);
  }
  out += '\n';
  for (std::size_t i = 0; i < values.rows; ++i) {
    out += csv_field(row_names[i]);
    for (std::size_t j = 0; j < values.cols; ++j) {
      out += ',';
      out += metrics::format_fixed6(values.at(i, j));
    }
    out += '\n';
  }
  return out;
}

namespace {

// Pairwise distances between rows of the set.
Matrix pairwise_distances(const LabelVectorSet& set, DistanceKind kind) {
  const std::size_t c = set.matrix.rows;
  Matrix d(c, c);
  if (kind == DistanceKind::kCosine) {
    SimilarityMatrix sim = cosine_matrix(set, set);
    for (std::size_t i = 0; i < c; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        d.at(i, j) = i == j ? 0.0 : 1.0 - sim.values.at(i, j);
      }
    }
  } else {
    for (std::size_t i = 0; i < c; ++i) {
      d.at(i, i) = 0.0;
      for (std::size_t j = i + 1; j < c; ++j) {
        CompensatedSum acc;
        for (std::size_t k = 0; k < set.matrix.cols; ++k) {
          const double diff = set.matrix.at(i, k) - set.matrix.at(j, k);
          acc.add(diff * diff);
        }
        const double dist = std::sqrt(acc.value());
        d.at(i, j) = dist;
        d.at(j, i) = dist;
      }
    }
  }
  return d;
}

}  // namespace

Dendrogram agglomerate(const LabelVectorSet& set, Linkage linkage,
                       DistanceKind distance) {
  set.validate();
  const std::size_t c = set.matrix.rows;

  Dendrogram out;
  out.n_leaves = c;
  out.nodes.reserve(2 * c - 1);
  for (std::size_t i = 0; i < c; ++i) {
    DendrogramNode leaf;
    leaf.name = set.names[i];
    leaf.min_leaf = i;
    leaf.n_leaves = 1;
    out.nodes.push_back(std::move(leaf));
  }
  if (c == 1) {
    out.leaf_order = {0};
    return out;
  }

  Matrix dist = pairwise_distances(set, distance);

  // Active clusters; each tracks its node index, size, and smallest leaf
  // index (the deterministic representative used for tie-breaking).
  struct Cluster {
    int node;
    std::size_t size;
    std::size_t min_leaf;
  };
  std::vector<Cluster> active(c);
  for (std::size_t i = 0; i < c; ++i) {
    active[i] = Cluster{static_cast<int>(i), 1, i};
  }
  // dist rows/cols track `active` slots; on merge the pair (i, j) collapses
  // into slot i and slot j swaps with the back.
  double prev_height = 0.0;
  for (std::size_t merge = 0; merge + 1 < c; ++merge) {
    const std::size_t n = active.size();
    std::size_t best_i = 0, best_j = 1;
    double best_d = std::numeric_limits<double>::infinity();
    std::size_t best_lo = 0, best_hi = 0;
    bool first = true;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dij = dist.at(i, j);
        const std::size_t lo = std::min(active[i].min_leaf, active[j].min_leaf);
        const std::size_t hi = std::max(active[i].min_leaf, active[j].min_leaf);
        const bool better =
            first || dij < best_d ||
            (dij == best_d && (lo < best_lo || (lo == best_lo && hi < best_hi)));
        if (better) {
          first = false;
          best_d = dij;
          best_i = i;
          best_j = j;
          best_lo = lo;
          best_hi = hi;
        }
      }
    }

    const Cluster a = active[best_i];
    const Cluster b = active[best_j];
    // Monotone linkages keep heights non-decreasing; the max() only absorbs
    // last-ulp rounding in the Lance-Williams updates.
    const double height = std::max(best_d, prev_height);
    prev_height = height;

    DendrogramNode node;
    // The child with the smaller representative renders on the left.
    if (a.min_leaf <= b.min_leaf) {
      node.left = a.node;
      node.right = b.node;
    } else {
      node.left = b.node;
      node.right = a.node;
    }
    node.height = height;
    node.min_leaf = std::min(a.min_leaf, b.min_leaf);
    node.n_leaves = a.size + b.size;
    const int new_node = static_cast<int>(out.nodes.size());
    out.nodes.push_back(std::move(node));

    // Lance-Williams distance from the merged cluster to every other one.
    for (std::size_t k = 0; k < n; ++k) {
      if (k == best_i || k == best_j) continue;
      const double dak = dist.at(best_i, k);
      const double dbk = dist.at(best_j, k);
      double d = 0.0;
      switch (linkage) {
        case Linkage::kAverage:
          d = (static_cast<double>(a.size) * dak +
               static_cast<double>(b.size) * dbk) /
              static_cast<double>(a.size + b.size);
          break;
        case Linkage::kSingle:
          d = std::min(dak, dbk);
          break;
        case Linkage::kComplete:
          d = std::max(dak, dbk);
          break;
      }
      dist.at(best_i, k) = d;
      dist.at(k, best_i) = d;
    }
    active[best_i] = Cluster{new_node, a.size + b.size,
                             std::min(a.min_leaf, b.min_leaf)};

    // Remove slot best_j by swapping with the last slot.
    const std::size_t last = n - 1;
    if (best_j != last) {
      active[best_j] = active[last];
      for (std::size_t k = 0; k < n; ++k) {
        dist.at(best_j, k) = dist.at(last, k);
        dist.at(k, best_j) = dist.at(k, last);
      }
      dist.at(best_j, best_j) = 0.0;
    }
    active.pop_back();
  }

  // Left-to-right leaf order via depth-first traversal from the root.
  out.leaf_order.reserve(c);
  std::vector<int> stack{out.root()};
  while (!stack.empty()) {
    const int idx = stack.back();
    stack.pop_back();
    const DendrogramNode& node = out.nodes[static_cast<std::size_t>(idx)];
    if (node.left < 0) {
      out.leaf_order.push_back(static_cast<std::size_t>(idx));
    } else {
      stack.push_back(node.right);  // right pushed first so left pops first
      stack.push_back(node.left);
    }
  }
  return out;
}

namespace {

// Dense cluster ids for leaves given a "merged" predicate over internal nodes.
template <typename KeepMerge>
std::vector<std::size_t> cut_impl(const Dendrogram& d, KeepMerge keep) {
  const std::size_t c = d.n_leaves;
  // Union by walking merges in order; nodes are topologically sorted.
  std::vector<std::size_t> owner(d.nodes.size());
  for (std::size_t i = 0; i < d.nodes.size(); ++i) owner[i] = i;
  for (std::size_t i = c; i < d.nodes.size(); ++i) {
    if (!keep(d.nodes[i])) continue;
    // Point both children's trees at this node.
    owner[static_cast<std::size_t>(d.nodes[i].left)] = i;
    owner[static_cast<std::size_t>(d.nodes[i].right)] = i;
    owner[i] = i;
  }
  auto find_root = [&owner](std::size_t x) {
    while (owner[x] != x) x = owner[x];
    return x;
  };
  std::vector<std::size_t> assignment(c);
  std::vector<std::size_t> dense(d.nodes.size(), std::numeric_limits<std::size_t>::max());
  std::size_t next_id = 0;
  for (std::size_t leaf = 0; leaf < c; ++leaf) {
    const std::size_t r = find_root(leaf);
    if (dense[r] == std::numeric_limits<std::size_t>::max()) dense[r] = next_id++;
    assignment[leaf] = dense[r];
  }
  return assignment;
}

}  // namespace

std::vector<std::size_t> Dendrogram::cut_k(std::size_t k) const {
  if (k < 1 || k > n_leaves) {
    throw InvalidK("cut_k: k must be in [1, " + std::to_string(n_leaves) +
                   "], got " + std::to_string(k));
  }
  // Applying the first C - k merges leaves exactly k clusters.
  const std::size_t limit = n_leaves + (n_leaves - k);
  std::size_t pos = n_leaves;
  return cut_impl(*this, [&](const DendrogramNode&) { return pos++ < limit; });
}

std::vector<std::size_t> Dendrogram::cut_height(double h) const {
  return cut_impl(*this, [h](const DendrogramNode& node) { return node.height <= h; });
}

namespace {

void json_escape_into(std::string& out, const std::string& s) {
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
}

void node_to_json(const Dendrogram& d, int idx, std::string& out) {
  const DendrogramNode& node = d.nodes[static_cast<std::size_t>(idx)];
  if (node.left < 0) {
    out += "{\"name\":\"";
    json_escape_into(out, node.name);
    out += "\",\"height\":";
    out += metrics::format_fixed6(node.height);
    out += '}';
    return;
  }
  out += "{\"height\":";
  out += metrics::format_fixed6(node.height);
  out += ",\"children\":[";
  node_to_json(d, node.left, out);
  out += ',';
  node_to_json(d, node.right, out);
  out += "]}";
}

}  // namespace

std::string Dendrogram::to_json() const {
  if (nodes.empty()) return "{}";
  std::string out;
  node_to_json(*this, root(), out);
  out += '\n';
  return out;
}

}  // namespace probekit::analysis
