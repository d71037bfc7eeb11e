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

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "probekit/embedding.hpp"
#include "probekit/errors.hpp"
#include "probekit/manifest.hpp"
#include "probekit/metrics.hpp"
#include "probekit/probe.hpp"

namespace probekit::cli {

namespace {

using harness::DatasetManifest;
using harness::ManifestItem;
using harness::Split;

// Labeled design matrix over the manifest items selected by `want` (nullopt
// selects everything), with features looked up in `set` by clip_id. The
// embeddings are used as stored; fold-wise normalization belongs to eval.
probe::LabeledData build_labeled(const DatasetManifest& m,
                                 const store::EmbeddingSet& set,
                                 std::optional<Split> want) {
  std::vector<const ManifestItem*> selected;
  for (const ManifestItem& item : m.items) {
    if (!want.has_value() || (item.split.has_value() && *item.split == *want)) {
      selected.push_back(&item);
    }
  }
  probe::LabeledData data;
  data.task = m.task;
  data.class_names = m.class_names;
  if (selected.empty()) return data;

  const std::size_t c = m.class_names.size();
  std::size_t dim = 0;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const store::Embedding* e = set.find(selected[i]->clip_id);
    if (e == nullptr) {
      throw ManifestError("no embedding for clip '" + selected[i]->clip_id + "'");
    }
    if (i == 0) {
      dim = e->vector.size();
      data.x = Matrix(selected.size(), dim);
      data.y = Matrix(selected.size(), c);
    }
    for (std::size_t j = 0; j < dim; ++j) {
      data.x.at(i, j) = static_cast<double>(e->vector[j]);
    }
    for (const std::string& label : selected[i]->labels) {
      data.y.at(i, m.class_index(label)) = 1.0;
    }
    data.clip_ids.push_back(selected[i]->clip_id);
  }
  return data;
}

std::string default_metric_name(TaskKind task) {
  return task == TaskKind::kMulticlass ? "accuracy" : "lwlrap";
}

}  // namespace

void run_probe_train(const ProbeTrainOptions& o) {
  probe::TrainConfig cfg;
  cfg.l2_lambda = o.l2;
  cfg.max_epochs = o.epochs;
  cfg.learning_rate = o.lr;
  cfg.batch_size = o.batch;
  cfg.momentum = o.momentum;
  cfg.early_stop_patience = o.patience;
  cfg.max_step_halvings = o.halvings;
  cfg.val_metric = o.val_metric;
  cfg.seed = o.seed;
  cfg.validate();

  const DatasetManifest m = harness::read_manifest(o.manifest);
  for (const ManifestItem& item : m.items) {
    if (item.fold.has_value()) {
      throw InvalidConfig(
          "probe train expects a split manifest; use eval for cross-validation");
    }
  }
  const store::EmbeddingSet set = store::read_embeddings(o.embeddings);

  const probe::LabeledData train = build_labeled(m, set, Split::kTrain);
  const probe::LabeledData val = build_labeled(m, set, Split::kVal);
  const probe::TrainResult result = probe::train_probe(train, val, cfg);

  const std::filesystem::path out_dir(o.out_dir);
  ensure_out_dir(out_dir);
  probe::write_probe(out_dir / "probe.aprb", result.model);

  const std::string metric_name =
      o.val_metric.empty() ? default_metric_name(m.task) : o.val_metric;
  std::string summary = "{\"best_epoch\":" + std::to_string(result.best_epoch) +
                        ",\"best_val_metric\":" +
                        metrics::format_fixed6(result.best_val_metric) +
                        ",\"epochs_run\":" + std::to_string(result.epochs_run) +
                        ",\"final_train_loss\":" +
                        metrics::format_fixed6(result.train_loss.empty()
                                                   ? 0.0
                                                   : result.train_loss.back()) +
                        ",\"n_train\":" + std::to_string(train.size()) +
                        ",\"n_val\":" + std::to_string(val.size()) +
                        ",\"val_metric\":\"" + json_escape(metric_name) + "\"}\n";
  write_text_file(out_dir / "train.json", summary);

  Provenance prov;
  prov.command = "probe-train";
  prov.seed = o.seed;
  prov.options = {
      {"batch", std::to_string(o.batch)},
      {"embeddings", o.embeddings},
      {"epochs", std::to_string(o.epochs)},
      {"halvings", std::to_string(o.halvings)},
      {"l2", canonical_double(o.l2)},
      {"lr", canonical_double(o.lr)},
      {"manifest", o.manifest},
      {"momentum", canonical_double(o.momentum)},
      {"out", o.out_dir},
      {"patience", std::to_string(o.patience)},
      {"val_metric", metric_name},
  };
  write_provenance(out_dir, prov);
}

void run_probe_predict(const ProbePredictOptions& o) {
  std::optional<Split> want;
  if (o.subset != "all") {
    want = harness::split_from_name(o.subset);  // ManifestError on bad name
    if (o.manifest.empty()) {
      throw InvalidConfig("--subset requires --manifest");
    }
  }

  const probe::ProbeModel model = probe::read_probe(o.model);
  const store::EmbeddingSet set = store::read_embeddings(o.embeddings);
  const std::filesystem::path out_dir(o.out_dir);
  ensure_out_dir(out_dir);

  std::string csv = "clip_id";
  for (const std::string& name : model.class_names) {
    csv += ',';
    csv += csv_field(name);
  }
  csv += '\n';

  auto append_row = [&](const std::string& clip_id, std::span<const double> probs) {
    csv += csv_field(clip_id);
    for (double p : probs) {
      csv += ',';
      csv += metrics::format_fixed6(p);
    }
    csv += '\n';
  };

  if (o.manifest.empty()) {
    // No labels available: score every stored embedding.
    for (const store::Embedding& e : set.items()) {
      append_row(e.clip_id, probe::predict(model, e));
    }
    write_text_file(out_dir / "scores.csv", csv);
  } else {
    const DatasetManifest m = harness::read_manifest(o.manifest);
    if (m.class_names != model.class_names) {
      throw LabelError("manifest class names do not match the model");
    }
    if (want.has_value()) {
      for (const ManifestItem& item : m.items) {
        if (item.fold.has_value()) {
          throw InvalidConfig("--subset requires a split manifest");
        }
      }
    }
    const probe::LabeledData data = build_labeled(m, set, want);
    data.validate();  // EmptyInput when the subset selected nothing
    const Matrix scores = probe::predict_batch(model, data.x);
    for (std::size_t i = 0; i < scores.rows; ++i) {
      append_row(data.clip_ids[i], scores.row(i));
    }
    write_text_file(out_dir / "scores.csv", csv);

    metrics::ScoreTable table{scores, data.y, model.class_names};
    const metrics::MetricReport report = metrics::standard_report(table, model.task);
    write_text_file(out_dir / "report.json", report.to_json());
  }

  Provenance prov;
  prov.command = "probe-predict";
  prov.options = {
      {"embeddings", o.embeddings},
      {"manifest", o.manifest},
      {"model", o.model},
      {"out", o.out_dir},
      {"subset", o.subset},
  };
  write_provenance(out_dir, prov);
}

}  // namespace probekit::cli
