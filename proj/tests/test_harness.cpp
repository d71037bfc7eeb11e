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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "probekit/errors.hpp"
#include "probekit/harness.hpp"
#include "probekit/hash.hpp"
#include "probekit/rng.hpp"
#include "support/synth.hpp"

using namespace probekit;
using harness::DatasetManifest;
using harness::ExperimentConfig;
using harness::ExperimentResult;
using harness::Protocol;
using testsupport::LabeledSet;

namespace {

probe::TrainConfig quick_train(double l2 = 0.0, int epochs = 25) {
  probe::TrainConfig cfg;
  cfg.l2_lambda = l2;
  cfg.max_epochs = epochs;
  cfg.learning_rate = 0.5;
  return cfg;
}

ExperimentConfig cv_config(int folds = 0) {
  ExperimentConfig cfg;
  cfg.protocol = Protocol::kCrossValidation;
  cfg.cv_folds = folds;
  cfg.grid = {quick_train()};
  cfg.seed = 7;
  return cfg;
}

bool contains_id(const std::vector<std::string>& ids, const std::string& id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

}  // namespace

TEST_CASE("five-fold cross-validation aggregates by plain mean") {
  Rng rng = make_rng(11);
  const LabeledSet set = testsupport::gaussian_classes(rng, 3, 20, 8);
  const DatasetManifest m = testsupport::cv_manifest(set, 5, TaskKind::kMulticlass);

  const ExperimentResult result =
      harness::run_cross_validation(m, set.embeddings, cv_config());
  REQUIRE(result.folds.size() == 5);
  CHECK(result.selection_metric == "accuracy");  // multiclass default
  CHECK(result.grid_size == 1);
  CHECK(result.manifest_counts == std::vector<std::size_t>{12, 12, 12, 12, 12});

  // Aggregate value = arithmetic mean of the per-fold values, per metric.
  for (const auto& [name, aggregate_value] : result.aggregate.values) {
    double sum = 0.0;
    for (const auto& fold : result.folds) sum += fold.report.value_of(name);
    CHECK(aggregate_value == doctest::Approx(sum / 5.0).epsilon(1e-12));
  }

  // Well-separated clusters: the probe should be close to perfect.
  CHECK(result.aggregate.value_of("accuracy") > 0.9);

  for (const auto& fold : result.folds) {
    CHECK(fold.fold >= 1);
    CHECK(fold.fold <= 5);
    CHECK(fold.n_test == 12);
    CHECK(fold.n_train + fold.n_val == 48);
    CHECK(harness::phases_leak_free(fold.phases));
    // Normalization statistics are fitted on exactly the training ids.
    CHECK(fold.phases.stats_fit == fold.phases.train);
    // Every test id sits in the fold it was annotated with.
    for (const auto& id : fold.phases.test) {
      const auto it = std::find_if(m.items.begin(), m.items.end(),
                                   [&](const auto& item) { return item.clip_id == id; });
      REQUIRE(it != m.items.end());
      CHECK(*it->fold == fold.fold);
    }
  }
}

TEST_CASE("experiments are deterministic and thread-count independent") {
  Rng rng = make_rng(22);
  const LabeledSet set = testsupport::gaussian_classes(rng, 2, 15, 6);
  const DatasetManifest m = testsupport::cv_manifest(set, 3, TaskKind::kMulticlass);

  ExperimentConfig cfg = cv_config();
  cfg.jobs = 1;
  const ExperimentResult a = harness::run_experiment(m, set.embeddings, cfg);
  const ExperimentResult b = harness::run_experiment(m, set.embeddings, cfg);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.folds_csv() == b.folds_csv());

  cfg.jobs = 4;
  const ExperimentResult parallel = harness::run_experiment(m, set.embeddings, cfg);
  CHECK(parallel.to_json() == a.to_json());
  CHECK(parallel.folds_csv() == a.folds_csv());
}

TEST_CASE("grid selection picks the dominant hyperparameter") {
  Rng rng = make_rng(33);
  const LabeledSet set = testsupport::gaussian_classes(rng, 2, 12, 8);
  const DatasetManifest m = testsupport::split_manifest(set, 8, 2, TaskKind::kMulticlass);

  // A trained probe against an untrained (0-epoch) one: the untrained model
  // ties every score, so its validation accuracy is strictly worse and the
  // selection cannot come down to a tie-break.
  ExperimentConfig cfg;
  cfg.protocol = Protocol::kSplit;
  cfg.grid = {quick_train(), quick_train(0.0, 0)};
  cfg.seed = 5;
  const ExperimentResult result = harness::run_split_experiment(m, set.embeddings, cfg);
  REQUIRE(result.folds.size() == 1);
  CHECK(result.chosen_grid_index == 0);  // the trained probe wins on validation
  CHECK(result.grid_size == 2);
  CHECK(result.folds[0].fold == 1);

  // Swap the grid order; the winner moves with it.
  ExperimentConfig swapped = cfg;
  std::swap(swapped.grid[0], swapped.grid[1]);
  const ExperimentResult flipped =
      harness::run_split_experiment(m, set.embeddings, swapped);
  CHECK(flipped.chosen_grid_index == 1);

  // The split counts mirror the manifest annotations.
  CHECK(result.manifest_counts == std::vector<std::size_t>{16, 4, 4});
  CHECK(result.folds[0].n_train == 16);
  CHECK(result.folds[0].n_val == 4);
  CHECK(result.folds[0].n_test == 4);
  CHECK(harness::phases_leak_free(result.folds[0].phases));
}

TEST_CASE("split manifests annotate items 12:1:3") {
  Rng rng = make_rng(44);
  const LabeledSet set = testsupport::gaussian_classes(rng, 2, 8, 8);
  DatasetManifest m;
  m.task = TaskKind::kMulticlass;
  m.class_names = set.class_names;
  for (std::size_t i = 0; i < set.clip_ids.size(); ++i) {
    harness::ManifestItem item;
    item.clip_id = set.clip_ids[i];
    item.embedding_ref = set.clip_ids[i];
    item.labels = {set.class_names[set.class_of[i]]};
    item.split = i < 12                     ? harness::Split::kTrain
                 : i < 13                   ? harness::Split::kVal
                                            : harness::Split::kTest;
    m.items.push_back(std::move(item));
  }
  ExperimentConfig cfg;
  cfg.protocol = Protocol::kSplit;
  cfg.grid = {quick_train()};
  const ExperimentResult result = harness::run_split_experiment(m, set.embeddings, cfg);
  CHECK(result.manifest_counts == std::vector<std::size_t>{12, 1, 3});
}

TEST_CASE("carved validation stays out of training") {
  Rng rng = make_rng(55);
  const LabeledSet set = testsupport::gaussian_classes(rng, 2, 12, 6);
  // No annotated validation items at all.
  const DatasetManifest m = testsupport::split_manifest(set, 9, 0, TaskKind::kMulticlass);

  ExperimentConfig no_val;
  no_val.protocol = Protocol::kSplit;
  no_val.grid = {quick_train()};
  CHECK_THROWS_AS(harness::run_split_experiment(m, set.embeddings, no_val),
                  ManifestError);

  ExperimentConfig carved = no_val;
  carved.carve_val = 4;
  const ExperimentResult result =
      harness::run_split_experiment(m, set.embeddings, carved);
  REQUIRE(result.folds.size() == 1);
  const auto& phases = result.folds[0].phases;
  CHECK(result.folds[0].n_val == 4);
  CHECK(result.folds[0].n_train == 18 - 4);
  CHECK(harness::phases_leak_free(phases));
  for (const auto& id : phases.val) {
    CHECK_FALSE(contains_id(phases.train, id));
    CHECK_FALSE(contains_id(phases.stats_fit, id));
  }

  // Carving more items than the training portion holds is an error.
  ExperimentConfig greedy = no_val;
  greedy.carve_val = 18;
  CHECK_THROWS_AS(harness::run_split_experiment(m, set.embeddings, greedy),
                  ManifestError);
}

TEST_CASE("manifest problems are reported before any training") {
  Rng rng = make_rng(66);
  const LabeledSet set = testsupport::gaussian_classes(rng, 2, 9, 6);

  // Folds {1, 3}: fold 2 missing.
  DatasetManifest gap = testsupport::cv_manifest(set, 3, TaskKind::kMulticlass);
  for (auto& item : gap.items) {
    if (*item.fold == 2) item.fold = 3;
  }
  CHECK_THROWS_WITH_AS(
      harness::run_cross_validation(gap, set.embeddings, cv_config()),
      doctest::Contains("missing fold ids"), ManifestError);

  // An embedding absent from the set.
  DatasetManifest m = testsupport::cv_manifest(set, 3, TaskKind::kMulticlass);
  store::EmbeddingSet incomplete;
  for (std::size_t i = 0; i + 1 < set.embeddings.size(); ++i) {
    incomplete.add(set.embeddings.at(i));
  }
  CHECK_THROWS_WITH_AS(harness::run_cross_validation(m, incomplete, cv_config()),
                       doctest::Contains("no embedding for clip"), ManifestError);

  // Split annotations fed to the CV protocol.
  const DatasetManifest split_m =
      testsupport::split_manifest(set, 6, 1, TaskKind::kMulticlass);
  CHECK_THROWS_AS(harness::run_cross_validation(split_m, set.embeddings, cv_config()),
                  ManifestError);

  // A single fold cannot cross-validate.
  DatasetManifest one_fold = testsupport::cv_manifest(set, 1, TaskKind::kMulticlass);
  CHECK_THROWS_WITH_AS(
      harness::run_cross_validation(one_fold, set.embeddings, cv_config()),
      doctest::Contains("at least 2 folds"), ManifestError);

  // Unknown selection metric surfaces as InvalidConfig.
  ExperimentConfig bad_metric = cv_config();
  bad_metric.selection_metric = "f1";
  CHECK_THROWS_AS(harness::run_cross_validation(m, set.embeddings, bad_metric),
                  InvalidConfig);
}

TEST_CASE("experiment config validation") {
  ExperimentConfig cfg;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);  // empty grid
  cfg.grid = {quick_train()};
  CHECK_NOTHROW(cfg.validate());
  cfg.cv_folds = -1;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg.cv_folds = 0;
  cfg.carve_val = -2;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg.carve_val = 0;
  cfg.jobs = -1;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);

  CHECK(harness::protocol_name(Protocol::kCrossValidation) == "cv");
  CHECK(harness::protocol_name(Protocol::kSplit) == "split");
  CHECK(harness::protocol_from_name("cv") == Protocol::kCrossValidation);
  CHECK(harness::protocol_from_name("split") == Protocol::kSplit);
  CHECK_THROWS_AS(harness::protocol_from_name("loocv"), InvalidConfig);
}

TEST_CASE("sweep order ranks objectives with stable ties and sinking NaNs") {
  using harness::sweep_order;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> v = {1.0, 0.5};
  CHECK(sweep_order(v) == std::vector<std::size_t>{0, 1});
  v = {0.5, 1.0};
  CHECK(sweep_order(v) == std::vector<std::size_t>{1, 0});
  v = {0.7, 0.7, 0.9};
  CHECK(sweep_order(v) == std::vector<std::size_t>{2, 0, 1});
  v = {nan, 0.2, nan, 0.8};
  CHECK(sweep_order(v) == std::vector<std::size_t>{3, 1, 0, 2});
  v = {nan};
  CHECK(sweep_order(v) == std::vector<std::size_t>{0});
}

TEST_CASE("config hashes track semantic changes and ignore jobs") {
  ExperimentConfig cfg = cv_config();
  ExperimentConfig other = cfg;
  other.jobs = 16;
  CHECK(harness::canonical_config(cfg) == harness::canonical_config(other));

  other = cfg;
  other.seed = cfg.seed + 1;
  CHECK(harness::canonical_config(cfg) != harness::canonical_config(other));
  CHECK(fnv1a64_hex(harness::canonical_config(cfg)) !=
        fnv1a64_hex(harness::canonical_config(other)));

  other = cfg;
  other.grid[0].l2_lambda = 0.25;
  CHECK(harness::canonical_config(cfg) != harness::canonical_config(other));

  // The reported hash matches the hash of the canonical form.
  Rng rng = make_rng(77);
  const LabeledSet set = testsupport::gaussian_classes(rng, 2, 9, 5);
  const DatasetManifest m = testsupport::cv_manifest(set, 3, TaskKind::kMulticlass);
  const ExperimentResult result = harness::run_experiment(m, set.embeddings, cfg);
  CHECK(result.config_hash == fnv1a64_hex(harness::canonical_config(cfg)));
  CHECK(result.seed == cfg.seed);
}

TEST_CASE("manifest files round trip and fail with line numbers") {
  testsupport::TempDir dir("manifest");
  Rng rng = make_rng(88);
  const LabeledSet set = testsupport::gaussian_classes(rng, 3, 4, 4);
  const DatasetManifest m = testsupport::cv_manifest(set, 2, TaskKind::kMulticlass);

  const auto path = dir.file("data.jsonl");
  harness::write_manifest(path, m);
  const DatasetManifest loaded = harness::read_manifest(path);
  CHECK(loaded.task == m.task);
  CHECK(loaded.class_names == m.class_names);
  REQUIRE(loaded.items.size() == m.items.size());
  for (std::size_t i = 0; i < m.items.size(); ++i) {
    CHECK(loaded.items[i].clip_id == m.items[i].clip_id);
    CHECK(loaded.items[i].labels == m.items[i].labels);
    CHECK(loaded.items[i].fold == m.items[i].fold);
  }
  // Byte-determinism of the writer.
  harness::write_manifest(dir.file("again.jsonl"), m);
  std::ifstream f1(path), f2(dir.file("again.jsonl"));
  const std::string s1((std::istreambuf_iterator<char>(f1)), {});
  const std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);

  // Malformed JSON on a specific line.
  const auto bad = dir.file("bad.jsonl");
  {
    std::ofstream out(bad);
    out << R"({"task": "multiclass", "class_names": ["a", "b"]})" << "\n";
    out << R"({"clip_id": "x", "embedding_ref": "x", "labels": ["a"], "fold": 1})"
        << "\n";
    out << "this is not json\n";
  }
  CHECK_THROWS_WITH_AS(harness::read_manifest(bad), doctest::Contains("line 3"),
                       ManifestError);

  // Unknown label.
  const auto unknown = dir.file("unknown.jsonl");
  {
    std::ofstream out(unknown);
    out << R"({"task": "multiclass", "class_names": ["a", "b"]})" << "\n";
    out << R"({"clip_id": "x", "embedding_ref": "x", "labels": ["zebra"], "fold": 1})"
        << "\n";
  }
  CHECK_THROWS_AS(harness::read_manifest(unknown), LabelError);

  // Both fold and split on one item.
  DatasetManifest conflicted = m;
  conflicted.items[0].split = harness::Split::kTrain;
  CHECK_THROWS_AS(conflicted.validate(), ManifestError);

  // Multiclass items need exactly one label.
  DatasetManifest two_labels = m;
  two_labels.items[0].labels = {set.class_names[0], set.class_names[1]};
  CHECK_THROWS_AS(two_labels.validate(), LabelError);

  CHECK(harness::split_name(harness::Split::kTrain) == "train");
  CHECK(harness::split_name(harness::Split::kVal) == "val");
  CHECK(harness::split_name(harness::Split::kTest) == "test");
  CHECK(harness::split_from_name("test") == harness::Split::kTest);
  CHECK_THROWS_AS(harness::split_from_name("holdout"), ManifestError);
}

TEST_CASE("multilabel experiments default to lwlrap") {
  Rng rng = make_rng(99);
  const LabeledSet set = testsupport::gaussian_classes(rng, 3, 10, 6);
  DatasetManifest m = testsupport::cv_manifest(set, 3, TaskKind::kMultilabel);
  // Give a few items a second label so the task is genuinely multilabel.
  for (std::size_t i = 0; i < m.items.size(); i += 7) {
    const auto& first = m.items[i].labels[0];
    for (const auto& name : m.class_names) {
      if (name != first) {
        m.items[i].labels.push_back(name);
        break;
      }
    }
  }
  const ExperimentResult result =
      harness::run_cross_validation(m, set.embeddings, cv_config());
  CHECK(result.selection_metric == "lwlrap");
  CHECK_NOTHROW(result.aggregate.value_of("lwlrap"));
  CHECK_NOTHROW(result.aggregate.value_of("map"));
  CHECK_THROWS_AS(result.aggregate.value_of("accuracy"), InvalidConfig);
}
