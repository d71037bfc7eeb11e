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

#include "probekit/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "probekit/errors.hpp"

namespace probekit::metrics {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Rank of class c within a score row under the lowest-index tie rule.
std::size_t rank_of_class(std::span<const double> row, std::size_t c) {
  std::size_t rank = 1;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] > row[c] || (row[j] == row[c] && j < c)) {
      ++rank;
    }
  }
  return rank;
}

std::size_t one_hot_class(const Matrix& truths, std::size_t i) {
  std::size_t hit = truths.cols;
  for (std::size_t c = 0; c < truths.cols; ++c) {
    if (truths.at(i, c) == 1.0) {
      if (hit != truths.cols) {
        throw ShapeError("truth row " + std::to_string(i) + " is not one-hot");
      }
      hit = c;
    }
  }
  if (hit == truths.cols) {
    throw ShapeError("truth row " + std::to_string(i) + " is not one-hot");
  }
  return hit;
}

// Item order for per-class rankings: score descending, index ascending.
std::vector<std::size_t> ranking_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  return order;
}

std::string json_string(std::string_view s) {
  return nlohmann::json(std::string(s)).dump();
}

}  // namespace

std::string format_fixed6(double v) {
  if (std::isnan(v)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void ScoreTable::validate(bool require_one_hot) const {
  if (scores.rows == 0 || scores.cols == 0) {
    throw EmptyInput("score table has no items or no classes");
  }
  if (!scores.same_shape(truths)) {
    throw ShapeError("score and truth matrices have different shapes");
  }
  if (!class_names.empty() && class_names.size() != scores.cols) {
    throw ShapeError("class_names length does not match the class count");
  }
  if (!scores.all_finite()) {
    throw DomainError("score table contains a non-finite score");
  }
  for (std::size_t i = 0; i < truths.rows; ++i) {
    for (std::size_t c = 0; c < truths.cols; ++c) {
      const double v = truths.at(i, c);
      if (v != 0.0 && v != 1.0) {
        throw ShapeError("truth entries must be 0 or 1");
      }
    }
    if (require_one_hot) {
      one_hot_class(truths, i);  // throws unless exactly one 1
    }
  }
}

double accuracy(const ScoreTable& t) {
  t.validate(/*require_one_hot=*/true);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < t.n_items(); ++i) {
    const std::size_t truth = one_hot_class(t.truths, i);
    if (rank_of_class(t.scores.row(i), truth) == 1) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(t.n_items());
}

double top_k_accuracy(const ScoreTable& t, int k) {
  t.validate(/*require_one_hot=*/true);
  if (k < 1 || static_cast<std::size_t>(k) > t.n_classes()) {
    throw InvalidK("k must lie in [1, " + std::to_string(t.n_classes()) +
                   "], got " + std::to_string(k));
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < t.n_items(); ++i) {
    const std::size_t truth = one_hot_class(t.truths, i);
    if (rank_of_class(t.scores.row(i), truth) <= static_cast<std::size_t>(k)) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(t.n_items());
}

double average_precision(std::span<const double> scores,
                         std::span<const double> truths) {
  if (scores.size() != truths.size()) {
    throw ShapeError("average_precision requires equal-length scores and truths");
  }
  std::size_t positives = 0;
  for (const double v : truths) {
    if (v != 0.0 && v != 1.0) {
      throw ShapeError("truth entries must be 0 or 1");
    }
    if (v == 1.0) ++positives;
  }
  if (positives == 0) {
    throw EmptyInput("average_precision needs at least one positive");
  }
  const std::vector<std::size_t> order = ranking_order(scores);
  CompensatedSum sum;
  std::size_t seen = 0;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    if (truths[order[pos]] == 1.0) {
      ++seen;
      sum.add(static_cast<double>(seen) / static_cast<double>(pos + 1));
    }
  }
  return sum.value() / static_cast<double>(positives);
}

ClassAverage map_score(const ScoreTable& t) {
  t.validate();
  ClassAverage out;
  out.per_class.assign(t.n_classes(), kNaN);
  CompensatedSum sum;
  std::size_t used = 0;
  std::vector<double> scores(t.n_items());
  std::vector<double> truths(t.n_items());
  for (std::size_t c = 0; c < t.n_classes(); ++c) {
    bool any_positive = false;
    for (std::size_t i = 0; i < t.n_items(); ++i) {
      scores[i] = t.scores.at(i, c);
      truths[i] = t.truths.at(i, c);
      any_positive = any_positive || truths[i] == 1.0;
    }
    if (!any_positive) {
      out.skipped.push_back(c);
      continue;
    }
    const double ap = average_precision(scores, truths);
    out.per_class[c] = ap;
    sum.add(ap);
    ++used;
  }
  if (used == 0) {
    throw EmptyInput("every class lacks positives; MAP is undefined");
  }
  out.value = sum.value() / static_cast<double>(used);
  return out;
}

ClassAverage mauc(const ScoreTable& t) {
  t.validate();
  ClassAverage out;
  out.per_class.assign(t.n_classes(), kNaN);
  CompensatedSum sum;
  std::size_t used = 0;
  for (std::size_t c = 0; c < t.n_classes(); ++c) {
    std::size_t p_count = 0;
    for (std::size_t i = 0; i < t.n_items(); ++i) {
      if (t.truths.at(i, c) == 1.0) ++p_count;
    }
    const std::size_t n_count = t.n_items() - p_count;
    if (p_count == 0 || n_count == 0) {
      out.skipped.push_back(c);
      continue;
    }
    // Rank-sum with average ranks for ties: AUC = (R_pos - P(P+1)/2) / (P*N).
    std::vector<std::size_t> order(t.n_items());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return t.scores.at(a, c) < t.scores.at(b, c);
    });
    double rank_sum_pos = 0.0;
    std::size_t pos = 0;
    while (pos < order.size()) {
      std::size_t stop = pos;
      while (stop + 1 < order.size() &&
             t.scores.at(order[stop + 1], c) == t.scores.at(order[pos], c)) {
        ++stop;
      }
      // Items pos..stop (0-based) share the average rank in 1-based terms.
      const double avg_rank = (static_cast<double>(pos + 1) +
                               static_cast<double>(stop + 1)) / 2.0;
      for (std::size_t idx = pos; idx <= stop; ++idx) {
        if (t.truths.at(order[idx], c) == 1.0) {
          rank_sum_pos += avg_rank;
        }
      }
      pos = stop + 1;
    }
    const double p = static_cast<double>(p_count);
    const double auc = (rank_sum_pos - p * (p + 1.0) / 2.0) /
                       (p * static_cast<double>(n_count));
    out.per_class[c] = auc;
    sum.add(auc);
    ++used;
  }
  if (used == 0) {
    throw EmptyInput("every class is degenerate; MAUC is undefined");
  }
  out.value = sum.value() / static_cast<double>(used);
  return out;
}

namespace {

// Shared lwlrap walk. Calls visit(class_index, precision) per (item, label).
template <typename Visit>
void lwlrap_walk(const ScoreTable& t, Visit visit) {
  for (std::size_t i = 0; i < t.n_items(); ++i) {
    const std::span<const double> row = t.scores.row(i);
    bool any = false;
    for (std::size_t c = 0; c < t.n_classes(); ++c) {
      if (t.truths.at(i, c) == 1.0) {
        any = true;
        break;
      }
    }
    if (!any) continue;
    const std::vector<std::size_t> order = ranking_order(row);
    std::size_t seen = 0;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const std::size_t c = order[pos];
      if (t.truths.at(i, c) == 1.0) {
        ++seen;
        visit(c, static_cast<double>(seen) / static_cast<double>(pos + 1));
      }
    }
  }
}

}  // namespace

double lwlrap(const ScoreTable& t) {
  t.validate();
  CompensatedSum sum;
  std::size_t pairs = 0;
  lwlrap_walk(t, [&](std::size_t, double precision) {
    sum.add(precision);
    ++pairs;
  });
  return pairs == 0 ? 0.0 : sum.value() / static_cast<double>(pairs);
}

ClassAverage lwlrap_per_class(const ScoreTable& t) {
  t.validate();
  std::vector<CompensatedSum> sums(t.n_classes());
  std::vector<std::size_t> counts(t.n_classes(), 0);
  CompensatedSum total;
  std::size_t pairs = 0;
  lwlrap_walk(t, [&](std::size_t c, double precision) {
    sums[c].add(precision);
    ++counts[c];
    total.add(precision);
    ++pairs;
  });
  ClassAverage out;
  out.per_class.assign(t.n_classes(), kNaN);
  for (std::size_t c = 0; c < t.n_classes(); ++c) {
    if (counts[c] == 0) {
      out.skipped.push_back(c);
    } else {
      out.per_class[c] = sums[c].value() / static_cast<double>(counts[c]);
    }
  }
  out.value = pairs == 0 ? 0.0 : total.value() / static_cast<double>(pairs);
  return out;
}

double MetricReport::value_of(std::string_view name) const {
  for (const auto& [key, value] : values) {
    if (key == name) return value;
  }
  throw InvalidConfig("metric '" + std::string(name) + "' is not in this report");
}

std::string MetricReport::to_json() const {
  std::string out = "{\n  \"metrics\": {";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ",";
    out += "\n    " + json_string(values[i].first) + ": " +
           format_fixed6(values[i].second);
  }
  out += values.empty() ? "},\n" : "\n  },\n";

  auto class_label = [&](std::size_t c) {
    return c < class_names.size() ? class_names[c]
                                  : "class_" + std::to_string(c);
  };

  out += "  \"per_class\": {";
  for (std::size_t i = 0; i < per_class.size(); ++i) {
    if (i > 0) out += ",";
    out += "\n    " + json_string(per_class[i].first) + ": {";
    const std::vector<double>& vals = per_class[i].second;
    for (std::size_t c = 0; c < vals.size(); ++c) {
      if (c > 0) out += ",";
      out += "\n      " + json_string(class_label(c)) + ": ";
      out += format_fixed6(vals[c]);
    }
    out += vals.empty() ? "}" : "\n    }";
  }
  out += per_class.empty() ? "},\n" : "\n  },\n";

  out += "  \"skipped\": {";
  for (std::size_t i = 0; i < skipped.size(); ++i) {
    if (i > 0) out += ",";
    out += "\n    " + json_string(skipped[i].first) + ": [";
    const std::vector<std::size_t>& idxs = skipped[i].second;
    for (std::size_t j = 0; j < idxs.size(); ++j) {
      if (j > 0) out += ", ";
      out += json_string(class_label(idxs[j]));
    }
    out += "]";
  }
  out += skipped.empty() ? "},\n" : "\n  },\n";

  out += "  \"n_items\": " + std::to_string(n_items) + "\n}\n";
  return out;
}

namespace {

// Degenerate tables (every class skipped) yield an undefined mean; report it
// as NaN with every class listed as skipped rather than failing the run.
ClassAverage class_average_or_nan(ClassAverage (*fn)(const ScoreTable&),
                                  const ScoreTable& t) {
  try {
    return fn(t);
  } catch (const EmptyInput&) {
    ClassAverage out;
    out.value = kNaN;
    out.per_class.assign(t.n_classes(), kNaN);
    out.skipped.resize(t.n_classes());
    std::iota(out.skipped.begin(), out.skipped.end(), 0);
    return out;
  }
}

}  // namespace

MetricReport standard_report(const ScoreTable& t, TaskKind task) {
  t.validate(task == TaskKind::kMulticlass);
  MetricReport report;
  report.class_names = t.class_names;
  report.n_items = t.n_items();

  const ClassAverage ap = class_average_or_nan(&map_score, t);
  const ClassAverage auc = class_average_or_nan(&mauc, t);

  if (task == TaskKind::kMulticlass) {
    report.values.emplace_back("accuracy", accuracy(t));
    if (t.n_classes() >= 5) {
      report.values.emplace_back("top5", top_k_accuracy(t, 5));
    }
    report.values.emplace_back("map", ap.value);
    report.values.emplace_back("mauc", auc.value);
  } else {
    report.values.emplace_back("map", ap.value);
    report.values.emplace_back("mauc", auc.value);
    const ClassAverage lw = lwlrap_per_class(t);
    report.values.emplace_back("lwlrap", lw.value);
    report.per_class.emplace_back("lwlrap", lw.per_class);
  }
  report.per_class.emplace_back("ap", ap.per_class);
  report.per_class.emplace_back("auc", auc.per_class);
  report.skipped.emplace_back("map", ap.skipped);
  report.skipped.emplace_back("mauc", auc.skipped);
  return report;
}

double metric_by_name(std::string_view name, const ScoreTable& t) {
  if (name == "accuracy") return accuracy(t);
  if (name == "map") return map_score(t).value;
  if (name == "mauc") return mauc(t).value;
  if (name == "lwlrap") return lwlrap(t);
  if (name.size() > 3 && name.substr(0, 3) == "top") {
    const std::string_view digits = name.substr(3);
    int k = 0;
    const auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec == std::errc() && ptr == digits.data() + digits.size()) {
      return top_k_accuracy(t, k);
    }
  }
  throw InvalidConfig("unknown metric '" + std::string(name) + "'");
}

}  // namespace probekit::metrics
