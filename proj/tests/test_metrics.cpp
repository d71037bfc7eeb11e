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
#include <string>
#include <vector>

#include "probekit/errors.hpp"
#include "probekit/metrics.hpp"
#include "probekit/rng.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace probekit;
using metrics::ScoreTable;

namespace {

ScoreTable table(std::size_t n, std::size_t c, std::vector<double> scores,
                 std::vector<double> truths) {
  ScoreTable t;
  t.scores = Matrix(n, c);
  t.scores.data = std::move(scores);
  t.truths = Matrix(n, c);
  t.truths.data = std::move(truths);
  return t;
}

}  // namespace

TEST_CASE("accuracy worked examples") {
  // All-zero scores: ties resolve to the lowest index, so only class-0 items
  // count as correct; a balanced two-class table scores 0.5.
  const auto zeros = table(4, 2, {0, 0, 0, 0, 0, 0, 0, 0},
                           {1, 0, 0, 1, 1, 0, 0, 1});
  CHECK(metrics::accuracy(zeros) == 0.5);

  // Three of four argmaxes correct.
  const auto t = table(4, 3,
                       {0.7, 0.2, 0.1,   // -> 0 (true 0)
                        0.1, 0.8, 0.1,   // -> 1 (true 1)
                        0.3, 0.3, 0.4,   // -> 2 (true 2)
                        0.6, 0.3, 0.1},  // -> 0 (true 1) miss
                       {1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 0});
  CHECK(metrics::accuracy(t) == 0.75);

  // k = C is always a hit; k = 1 is plain accuracy.
  CHECK(metrics::top_k_accuracy(t, 3) == 1.0);
  CHECK(metrics::top_k_accuracy(t, 1) == metrics::accuracy(t));

  // [0.2, 0.5, 0.3] with true class 2: rank 2, inside the top 2.
  const auto one = table(1, 3, {0.2, 0.5, 0.3}, {0, 0, 1});
  CHECK(metrics::top_k_accuracy(one, 1) == 0.0);
  CHECK(metrics::top_k_accuracy(one, 2) == 1.0);

  CHECK_THROWS_AS(metrics::top_k_accuracy(t, 0), InvalidK);
  CHECK_THROWS_AS(metrics::top_k_accuracy(t, 4), InvalidK);
}

TEST_CASE("average precision worked example") {
  const std::vector<double> scores = {0.9, 0.8, 0.7};
  const std::vector<double> truths = {1.0, 0.0, 1.0};
  // Positives at ranks 1 and 3: (1/1 + 2/3) / 2 = 5/6.
  CHECK(metrics::average_precision(scores, truths) ==
        doctest::Approx(5.0 / 6.0).epsilon(1e-15));

  const std::vector<double> none = {0.0, 0.0};
  const std::vector<double> no_pos = {0.0, 0.0};
  CHECK_THROWS_AS(metrics::average_precision(none, no_pos), EmptyInput);
}

TEST_CASE("mauc worked examples") {
  // Strictly separated: every positive above every negative.
  auto strict = table(4, 1, {0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0});
  CHECK(metrics::mauc(strict).value == 1.0);

  // All scores equal: every pair ties, AUC 0.5.
  auto tied = table(4, 1, {0.5, 0.5, 0.5, 0.5}, {1, 1, 0, 0});
  CHECK(metrics::mauc(tied).value == 0.5);

  // pos {0.9} vs neg {0.8, 0.3}: both pairs won.
  auto pairwise = table(3, 1, {0.9, 0.8, 0.3}, {1, 0, 0});
  CHECK(metrics::mauc(pairwise).value == 1.0);
}

TEST_CASE("lwlrap single-item worked example") {
  // True labels a and b; scores a=0.9, c=0.8, b=0.7.
  // Label a: rank 1, precision 1. Label b: rank 3, two true at or above -> 2/3.
  auto t = table(1, 3, {0.9, 0.7, 0.8}, {1, 1, 0});
  CHECK(metrics::lwlrap(t) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));

  // An all-zero truth table has no (item, label) pairs and scores 0.
  auto empty_truth = table(2, 3, {0.1, 0.2, 0.3, 0.3, 0.2, 0.1},
                           {0, 0, 0, 0, 0, 0});
  CHECK(metrics::lwlrap(empty_truth) == 0.0);
}

TEST_CASE("metrics agree with exhaustive oracles on tie-heavy tables") {
  Rng rng = make_rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(next_int(rng, 0, 19));
    const std::size_t c = 2 + static_cast<std::size_t>(next_int(rng, 0, 6));

    // Multiclass tables for accuracy / top-k.
    const auto mc = testsupport::random_score_table(rng, n, c, false);
    CHECK(metrics::accuracy(mc) == testsupport::naive_accuracy(mc));
    for (int k = 1; k <= static_cast<int>(c); ++k) {
      CHECK(metrics::top_k_accuracy(mc, k) == testsupport::naive_top_k(mc, k));
    }

    // Multilabel tables for the ranking metrics. (lwlrap accumulates with a
    // compensated sum, so it can differ from the plain-sum oracle in the
    // last bit; the contract is 1e-12 agreement.)
    const auto ml = testsupport::random_score_table(rng, n, c, true);
    CHECK(metrics::lwlrap(ml) ==
          doctest::Approx(testsupport::naive_lwlrap(ml)).epsilon(1e-12));
    const double expected_map = testsupport::naive_map(ml);
    const double expected_mauc = testsupport::naive_mauc(ml);
    if (std::isnan(expected_map)) {
      CHECK_THROWS_AS(metrics::map_score(ml), EmptyInput);
    } else {
      CHECK(metrics::map_score(ml).value ==
            doctest::Approx(expected_map).epsilon(1e-12));
    }
    if (std::isnan(expected_mauc)) {
      CHECK_THROWS_AS(metrics::mauc(ml), EmptyInput);
    } else {
      CHECK(metrics::mauc(ml).value ==
            doctest::Approx(expected_mauc).epsilon(1e-12));
    }
  }
}

TEST_CASE("per-class averages report their skipped classes") {
  // Class 1 has no positives; class 2 has no negatives.
  auto t = table(3, 3,
                 {0.9, 0.1, 0.8,
                  0.7, 0.2, 0.6,
                  0.3, 0.3, 0.9},
                 {1, 0, 1,
                  0, 0, 1,
                  1, 0, 1});
  const auto ap = metrics::map_score(t);
  REQUIRE(ap.skipped.size() == 1);
  CHECK(ap.skipped[0] == 1);
  CHECK(std::isnan(ap.per_class[1]));
  CHECK_FALSE(std::isnan(ap.per_class[0]));

  const auto auc = metrics::mauc(t);
  // Class 1: no positives. Class 2: no negatives. Both skipped.
  REQUIRE(auc.skipped.size() == 2);
  CHECK(auc.skipped[0] == 1);
  CHECK(auc.skipped[1] == 2);

  // Every class degenerate: the bare metric refuses, the standard report
  // carries NaN and serializes it as null.
  auto all_pos = table(2, 2, {0.3, 0.4, 0.2, 0.1}, {1, 1, 1, 1});
  CHECK_THROWS_AS(metrics::mauc(all_pos), EmptyInput);
  const auto report = metrics::standard_report(all_pos, TaskKind::kMultilabel);
  CHECK(std::isnan(report.value_of("mauc")));
  const std::string json = report.to_json();
  CHECK(json.find("\"mauc\": null") != std::string::npos);
}

TEST_CASE("ranking metrics are invariant under monotone score maps") {
  Rng rng = make_rng(555);
  for (int trial = 0; trial < 40; ++trial) {
    const auto ml = testsupport::random_score_table(rng, 12, 5, true);
    ScoreTable scaled = ml;
    for (auto& s : scaled.scores.data) s = 2.0 * s + 1.0;  // ties preserved
    CHECK(metrics::lwlrap(scaled) == metrics::lwlrap(ml));
    const bool map_defined = !testsupport::all_classes_lack_positives(ml);
    if (map_defined) {
      CHECK(metrics::map_score(scaled).value ==
            doctest::Approx(metrics::map_score(ml).value).epsilon(1e-15));
    }

    const auto mc = testsupport::random_score_table(rng, 12, 5, false);
    ScoreTable mc_scaled = mc;
    for (auto& s : mc_scaled.scores.data) s = 2.0 * s + 1.0;
    CHECK(metrics::accuracy(mc_scaled) == metrics::accuracy(mc));
    CHECK(metrics::top_k_accuracy(mc_scaled, 3) == metrics::top_k_accuracy(mc, 3));
  }
}

TEST_CASE("standard reports serialize byte-stably at six decimals") {
  Rng rng = make_rng(77);
  const auto mc = testsupport::random_score_table(rng, 10, 6, false);
  const auto report = metrics::standard_report(mc, TaskKind::kMulticlass);
  CHECK(report.value_of("accuracy") == metrics::accuracy(mc));
  CHECK(report.value_of("top5") == metrics::top_k_accuracy(mc, 5));
  CHECK_THROWS_AS(report.value_of("lwlrap"), InvalidConfig);

  const std::string json = report.to_json();
  CHECK(json == report.to_json());  // stable across calls
  CHECK(json.find("\"accuracy\": " + metrics::format_fixed6(
                      report.value_of("accuracy"))) != std::string::npos);

  // Multilabel reports carry map/mauc/lwlrap and no accuracy.
  const auto ml = testsupport::random_score_table(rng, 10, 4, true);
  const auto ml_report = metrics::standard_report(ml, TaskKind::kMultilabel);
  CHECK_NOTHROW(ml_report.value_of("lwlrap"));
  CHECK_THROWS_AS(ml_report.value_of("accuracy"), InvalidConfig);

  CHECK(metrics::format_fixed6(5.0 / 6.0) == "0.833333");
  CHECK(metrics::format_fixed6(1.0) == "1.000000");
  CHECK(metrics::format_fixed6(std::nan("")) == "null");
}

TEST_CASE("metric_by_name dispatch") {
  Rng rng = make_rng(88);
  const auto mc = testsupport::random_score_table(rng, 15, 6, false);
  CHECK(metrics::metric_by_name("accuracy", mc) == metrics::accuracy(mc));
  CHECK(metrics::metric_by_name("top5", mc) == metrics::top_k_accuracy(mc, 5));
  CHECK(metrics::metric_by_name("top1", mc) == metrics::accuracy(mc));
  CHECK(metrics::metric_by_name("map", mc) == metrics::map_score(mc).value);
  CHECK(metrics::metric_by_name("mauc", mc) == metrics::mauc(mc).value);
  CHECK(metrics::metric_by_name("lwlrap", mc) == metrics::lwlrap(mc));
  CHECK_THROWS_AS(metrics::metric_by_name("f1", mc), InvalidConfig);
  // "top0" is a well-formed name with an out-of-range k.
  CHECK_THROWS_AS(metrics::metric_by_name("top0", mc), InvalidK);
  CHECK_THROWS_AS(metrics::metric_by_name("topx", mc), InvalidConfig);
  CHECK_THROWS_AS(metrics::metric_by_name("", mc), InvalidConfig);
}

TEST_CASE("score table validation") {
  ScoreTable empty;
  CHECK_THROWS_AS(empty.validate(), EmptyInput);

  auto shape = table(2, 2, {0.1, 0.2, 0.3, 0.4}, {1, 0, 0, 1});
  shape.truths = Matrix(1, 2);
  CHECK_THROWS_AS(shape.validate(), ShapeError);

  auto inf = table(1, 2, {std::numeric_limits<double>::infinity(), 0.0}, {1, 0});
  CHECK_THROWS_AS(inf.validate(), DomainError);

  auto frac = table(1, 2, {0.1, 0.2}, {0.5, 0.5});
  CHECK_THROWS_AS(frac.validate(), ShapeError);

  auto two_hot = table(1, 2, {0.1, 0.2}, {1, 1});
  CHECK_NOTHROW(two_hot.validate(false));
  CHECK_THROWS_AS(two_hot.validate(true), ShapeError);

  auto named = table(1, 2, {0.1, 0.2}, {1, 0});
  named.class_names = {"only_one"};
  CHECK_THROWS_AS(named.validate(), ShapeError);
}
