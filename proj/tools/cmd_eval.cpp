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

#include <charconv>
#include <string>
#include <vector>

#include "common.hpp"
#include "probekit/embedding.hpp"
#include "probekit/errors.hpp"
#include "probekit/harness.hpp"
#include "probekit/manifest.hpp"

namespace probekit::cli {

namespace {

// Syntactic metric-name check so bad flags fail before any file is read.
bool is_metric_name(const std::string& name) {
  if (name == "accuracy" || name == "map" || name == "mauc" || name == "lwlrap") {
    return true;
  }
  if (name.size() > 3 && name.compare(0, 3, "top") == 0) {
    int k = 0;
    const char* begin = name.data() + 3;
    const char* end = name.data() + name.size();
    const auto result = std::from_chars(begin, end, k);
    return result.ec == std::errc() && result.ptr == end && k >= 1;
  }
  return false;
}

}  // namespace

void run_eval(const EvalOptions& o) {
  // Assemble and validate the experiment before any I/O.
  harness::ExperimentConfig cfg;
  cfg.cv_folds = o.folds;
  cfg.selection_metric = o.metric;
  cfg.seed = o.seed;
  cfg.carve_val = o.carve_val;
  cfg.jobs = o.jobs;

  std::vector<double> l2_grid = o.l2_grid;
  if (l2_grid.empty()) l2_grid.push_back(0.0);
  for (double l2 : l2_grid) {
    probe::TrainConfig tc;
    tc.l2_lambda = l2;
    tc.max_epochs = o.epochs;
    tc.learning_rate = o.lr;
    tc.batch_size = o.batch;
    tc.momentum = o.momentum;
    tc.early_stop_patience = o.patience;
    tc.max_step_halvings = o.halvings;
    tc.val_metric = o.metric;
    cfg.grid.push_back(std::move(tc));
  }
  if (!o.metric.empty() && !is_metric_name(o.metric)) {
    throw InvalidConfig("unknown metric '" + o.metric +
                        "' (expected accuracy, topN, map, mauc, or lwlrap)");
  }
  const bool explicit_protocol = !o.protocol.empty();
  if (explicit_protocol) {
    cfg.protocol = harness::protocol_from_name(o.protocol);
  }
  cfg.validate();

  const harness::DatasetManifest m = harness::read_manifest(o.manifest);
  const harness::Protocol inferred = !m.items.empty() && m.items.front().fold.has_value()
                                         ? harness::Protocol::kCrossValidation
                                         : harness::Protocol::kSplit;
  if (!explicit_protocol) {
    cfg.protocol = inferred;
  } else if (cfg.protocol != inferred) {
    throw InvalidConfig("--protocol " + o.protocol + " does not match the manifest's " +
                        std::string(harness::protocol_name(inferred)) + " annotations");
  }

  const store::EmbeddingSet set = store::read_embeddings(o.embeddings);
  const harness::ExperimentResult result = harness::run_experiment(m, set, cfg);

  const std::filesystem::path out_dir(o.out_dir);
  ensure_out_dir(out_dir);
  write_text_file(out_dir / "report.json", result.to_json());
  write_text_file(out_dir / "folds.csv", result.folds_csv());

  std::string l2_list;
  for (std::size_t i = 0; i < l2_grid.size(); ++i) {
    if (i > 0) l2_list += ' ';
    l2_list += canonical_double(l2_grid[i]);
  }
  Provenance prov;
  prov.command = "eval";
  prov.seed = o.seed;
  prov.options = {
      {"batch", std::to_string(o.batch)},
      {"carve_val", std::to_string(o.carve_val)},
      {"embeddings", o.embeddings},
      {"epochs", std::to_string(o.epochs)},
      {"folds", std::to_string(o.folds)},
      {"halvings", std::to_string(o.halvings)},
      {"jobs", std::to_string(o.jobs)},
      {"l2", l2_list},
      {"lr", canonical_double(o.lr)},
      {"manifest", o.manifest},
      {"metric", result.selection_metric},
      {"momentum", canonical_double(o.momentum)},
      {"out", o.out_dir},
      {"patience", std::to_string(o.patience)},
      {"protocol", std::string(harness::protocol_name(cfg.protocol))},
  };
  write_provenance(out_dir, prov);
}

}  // namespace probekit::cli
