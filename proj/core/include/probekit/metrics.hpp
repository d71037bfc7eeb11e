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

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "probekit/numeric.hpp"
#include "probekit/task.hpp"

namespace probekit::metrics {

// Scores and ground truth for N items over C classes.
//
// Tie policy (scores compare equal):
//   - accuracy / top-k: rank of class c = 1 + #{j : s_j > s_c}
//                       + #{j < c : s_j == s_c} (lowest index wins).
//   - AP / lwlrap: items/classes are ordered by (score desc, index asc).
//   - AUC: tied positive/negative pairs count 0.5.
struct ScoreTable {
  Matrix scores;  // N x C, finite
  Matrix truths;  // N x C, entries in {0, 1}
  std::vector<std::string> class_names;  // size C, or empty for unnamed classes

  std::size_t n_items() const { return scores.rows; }
  std::size_t n_classes() const { return scores.cols; }

  // Throws ShapeError / DomainError / EmptyInput on a malformed table; with
  // require_one_hot, every truth row must contain exactly one 1.
  void validate(bool require_one_hot = false) const;
};

// Fraction of rows whose argmax score (lowest index on ties) is the true
// class. Requires one-hot truth rows.
double accuracy(const ScoreTable& t);

// Fraction of rows whose true class ranks within the top k. Throws InvalidK
// unless 1 <= k <= C.
double top_k_accuracy(const ScoreTable& t, int k);

// AP of one ranking: mean over positive items of precision at that item's
// rank, ranking by (score desc, index asc). Throws EmptyInput when no
// positives exist.
double average_precision(std::span<const double> scores,
                         std::span<const double> truths);

// A per-class mean plus the classes that had to be left out of it.
struct ClassAverage {
  double value = 0.0;
  std::vector<double> per_class;       // size C; NaN for skipped classes
  std::vector<std::size_t> skipped;    // ascending class indices
};

// Mean AP over classes with >= 1 positive; others are skipped and reported.
ClassAverage map_score(const ScoreTable& t);

// Mean Mann-Whitney AUC, (wins + 0.5 * ties) / (P * N), over classes with
// >= 1 positive and >= 1 negative; others are skipped and reported.
ClassAverage mauc(const ScoreTable& t);

// Label-weighted label-ranking average precision: the mean over all
// (item, true label) pairs of (# true labels ranked at or above) / rank.
// Zero-label rows contribute nothing; an all-zero table scores 0.
double lwlrap(const ScoreTable& t);

// Per-class lwlrap components (mean precision of each class's label
// occurrences); NaN for classes that never occur.
ClassAverage lwlrap_per_class(const ScoreTable& t);

// One evaluation bundle. `values` is ordered; serialization is byte-stable.
struct MetricReport {
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::pair<std::string, std::vector<double>>> per_class;
  std::vector<std::pair<std::string, std::vector<std::size_t>>> skipped;
  std::vector<std::string> class_names;
  std::size_t n_items = 0;

  // Throws InvalidConfig when the metric is absent.
  double value_of(std::string_view name) const;

  // JSON document with metric values fixed at 6 decimal places.
  std::string to_json() const;
};

// The task's standard metric set: accuracy, top5 (when C >= 5), map, mauc
// for multiclass; map, mauc, lwlrap for multilabel. A mean metric whose
// every class is degenerate is reported as NaN (serialized as null).
MetricReport standard_report(const ScoreTable& t, TaskKind task);

// "%.6f" rendering of a value; NaN renders as "null".
std::string format_fixed6(double v);

// Evaluate one metric by name: "accuracy", "topK" (e.g. "top5"), "map",
// "mauc", "lwlrap". Throws InvalidConfig for unknown names.
double metric_by_name(std::string_view name, const ScoreTable& t);

}  // namespace probekit::metrics
