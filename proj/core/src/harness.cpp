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

#include "probekit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "probekit/errors.hpp"
#include "probekit/hash.hpp"
#include "probekit/log.hpp"
#include "probekit/rng.hpp"

namespace probekit::harness {

std::string_view protocol_name(Protocol p) {
  return p == Protocol::kCrossValidation ? "cv" : "split";
}

Protocol protocol_from_name(std::string_view name) {
  if (name == "cv") return Protocol::kCrossValidation;
  if (name == "split") return Protocol::kSplit;
  throw InvalidConfig("unknown protocol '" + std::string(name) +
                      "' (expected cv or split)");
}

void ExperimentConfig::validate() const {
  if (cv_folds < 0) {
    throw InvalidConfig("cv_folds must be >= 0 (0 infers the fold count)");
  }
  if (grid.empty()) {
    throw InvalidConfig("the hyperparameter grid must contain at least one point");
  }
  for (const probe::TrainConfig& tc : grid) {
    tc.validate();
  }
  if (carve_val < 0) {
    throw InvalidConfig("carve_val must be >= 0");
  }
  if (jobs < 0) {
    throw InvalidConfig("jobs must be >= 0 (0 = hardware concurrency)");
  }
}

bool phases_leak_free(const PhaseIds& phases) {
  const std::unordered_set<std::string> test(phases.test.begin(), phases.test.end());
  const std::unordered_set<std::string> val(phases.val.begin(), phases.val.end());
  for (const std::vector<std::string>* ids :
       {&phases.stats_fit, &phases.train, &phases.val}) {
    for (const std::string& id : *ids) {
      if (test.contains(id)) return false;
    }
  }
  for (const std::vector<std::string>* ids : {&phases.stats_fit, &phases.train}) {
    for (const std::string& id : *ids) {
      if (val.contains(id)) return false;
    }
  }
  return true;
}

std::vector<std::size_t> sweep_order(std::span<const double> objectives) {
  std::vector<std::size_t> order(objectives.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    // NaN objectives sink to the end; otherwise descending objective.
    const bool a_ok = !std::isnan(objectives[a]);
    const bool b_ok = !std::isnan(objectives[b]);
    if (a_ok != b_ok) return a_ok;
    return objectives[a] > objectives[b];
  });
  return order;
}

std::string canonical_config(const ExperimentConfig& cfg) {
  // `jobs` is deliberately left out: it changes scheduling, never results.
  nlohmann::json j;
  j["protocol"] = std::string(protocol_name(cfg.protocol));
  j["cv_folds"] = cfg.cv_folds;
  j["selection_metric"] = cfg.selection_metric;
  j["seed"] = cfg.seed;
  j["carve_val"] = cfg.carve_val;
  nlohmann::json grid = nlohmann::json::array();
  for (const probe::TrainConfig& tc : cfg.grid) {
    nlohmann::json g;
    g["l2_lambda"] = tc.l2_lambda;
    g["max_epochs"] = tc.max_epochs;
    g["learning_rate"] = tc.learning_rate;
    g["batch_size"] = tc.batch_size;
    g["seed"] = tc.seed;
    g["early_stop_patience"] = tc.early_stop_patience;
    g["max_step_halvings"] = tc.max_step_halvings;
    g["momentum"] = tc.momentum;
    g["val_metric"] = tc.val_metric;
    grid.push_back(std::move(g));
  }
  j["grid"] = std::move(grid);
  return j.dump();
}

namespace {

struct ResolvedItem {
  const ManifestItem* item = nullptr;
  const store::Embedding* embedding = nullptr;
};

std::vector<ResolvedItem> resolve_items(const DatasetManifest& m,
                                        const store::EmbeddingSet& embeddings) {
  std::vector<ResolvedItem> resolved;
  resolved.reserve(m.items.size());
  for (const ManifestItem& item : m.items) {
    const store::Embedding* e = embeddings.find(item.clip_id);
    if (e == nullptr) {
      throw ManifestError("no embedding for clip '" + item.clip_id + "'");
    }
    resolved.push_back({&item, e});
  }
  return resolved;
}

store::EmbeddingSet subset_of(std::span<const ResolvedItem> resolved,
                              std::span<const std::size_t> indices) {
  store::EmbeddingSet out;
  for (const std::size_t i : indices) {
    out.add(*resolved[i].embedding);
  }
  return out;
}

probe::LabeledData build_data(const DatasetManifest& m,
                              std::span<const ResolvedItem> resolved,
                              std::span<const std::size_t> indices,
                              const store::NormalizationStats& stats) {
  probe::LabeledData data;
  data.task = m.task;
  data.class_names = m.class_names;
  const std::size_t n = indices.size();
  data.x = Matrix(n, stats.dim());
  data.y = Matrix(n, m.class_names.size());
  data.clip_ids.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    const ResolvedItem& ri = resolved[indices[r]];
    const store::NormalizeOutcome outcome = store::normalize(stats, *ri.embedding);
    if (outcome.degenerate) {
      PK_WARN("clip '%s' normalizes to the zero vector", ri.item->clip_id.c_str());
    }
    for (std::size_t d = 0; d < stats.dim(); ++d) {
      data.x.at(r, d) = static_cast<double>(outcome.embedding.vector[d]);
    }
    for (const std::string& label : ri.item->labels) {
      data.y.at(r, m.class_index(label)) = 1.0;
    }
    data.clip_ids.push_back(ri.item->clip_id);
  }
  return data;
}

std::vector<std::string> ids_of(std::span<const ResolvedItem> resolved,
                                std::span<const std::size_t> indices) {
  std::vector<std::string> ids;
  ids.reserve(indices.size());
  for (const std::size_t i : indices) {
    ids.push_back(resolved[i].item->clip_id);
  }
  return ids;
}

int effective_jobs(int jobs, std::size_t task_count) {
  if (jobs == 0) {
    const unsigned hc = std::thread::hardware_concurrency();
    jobs = hc == 0 ? 1 : static_cast<int>(hc);
  }
  return static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(jobs), task_count));
}

// Runs fn(0..count-1), possibly across threads; results must be written to
// per-index slots. The first exception (by index) is rethrown after joining.
void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& fn) {
  jobs = effective_jobs(jobs, count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : workers) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct FoldJob {
  int fold_id = 1;  // 1-based label used in reports
  std::uint64_t fold_seed = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

// Carves cfg.carve_val items from job.train into job.val (seeded shuffle)
// when the job has no validation items yet.
void maybe_carve_val(FoldJob& job, const ExperimentConfig& cfg) {
  if (cfg.carve_val <= 0 || !job.val.empty()) {
    return;
  }
  if (static_cast<std::size_t>(cfg.carve_val) >= job.train.size()) {
    throw ManifestError("carve_val=" + std::to_string(cfg.carve_val) +
                        " leaves no training items");
  }
  std::vector<std::size_t> pool = job.train;
  Rng rng = make_rng(derive_seed(job.fold_seed, 0));
  shuffle_in_place(rng, pool);
  job.val.assign(pool.begin(), pool.begin() + cfg.carve_val);
  job.train.assign(pool.begin() + cfg.carve_val, pool.end());
  std::sort(job.val.begin(), job.val.end());
  std::sort(job.train.begin(), job.train.end());
}

FoldResult run_fold(const DatasetManifest& m,
                    std::span<const ResolvedItem> resolved,
                    const ExperimentConfig& cfg, const std::string& metric,
                    FoldJob job, int grid_jobs) {
  maybe_carve_val(job, cfg);
  if (job.train.empty()) {
    throw ManifestError("fold " + std::to_string(job.fold_id) +
                        " has no training items");
  }
  if (job.test.empty()) {
    throw ManifestError("fold " + std::to_string(job.fold_id) +
                        " has no held-out items");
  }

  const store::NormalizationStats stats =
      store::fit_normalizer(subset_of(resolved, job.train));
  const probe::LabeledData train_data = build_data(m, resolved, job.train, stats);
  const probe::LabeledData val_data = build_data(m, resolved, job.val, stats);
  const probe::LabeledData test_data = build_data(m, resolved, job.test, stats);

  const std::size_t grid_size = cfg.grid.size();
  std::vector<double> objectives(grid_size);
  std::vector<probe::TrainResult> results(grid_size);
  parallel_for(grid_size, grid_jobs, [&](std::size_t g) {
    probe::TrainConfig tc = cfg.grid[g];
    tc.seed = derive_seed(job.fold_seed, 1 + g);
    tc.val_metric = metric;
    results[g] = probe::train_probe(train_data, val_data, tc);
    objectives[g] = results[g].best_val_metric;
  });
  const std::size_t chosen = sweep_order(objectives)[0];
  const probe::TrainResult& best = results[chosen];

  metrics::ScoreTable table;
  table.scores = probe::predict_batch(best.model, test_data.x);
  table.truths = test_data.y;
  table.class_names = m.class_names;

  FoldResult fold;
  fold.fold = job.fold_id;
  fold.report = metrics::standard_report(table, m.task);
  fold.n_train = job.train.size();
  fold.n_val = job.val.size();
  fold.n_test = job.test.size();
  fold.chosen_grid_index = static_cast<int>(chosen);
  fold.validation_objective = objectives[chosen];
  fold.best_epoch = best.best_epoch;
  fold.phases.stats_fit = ids_of(resolved, job.train);
  fold.phases.train = ids_of(resolved, job.train);
  fold.phases.val = ids_of(resolved, job.val);
  fold.phases.test = ids_of(resolved, job.test);
  if (!phases_leak_free(fold.phases)) {
    throw Error("internal: fold " + std::to_string(job.fold_id) +
                    " leaked held-out items into training phases",
                /*usage=*/false);
  }
  return fold;
}

std::string default_metric(const DatasetManifest& m, const ExperimentConfig& cfg) {
  if (!cfg.selection_metric.empty()) {
    return cfg.selection_metric;
  }
  return m.task == TaskKind::kMulticlass ? "accuracy" : "lwlrap";
}

metrics::MetricReport aggregate_folds(const std::vector<FoldResult>& folds,
                                      const DatasetManifest& m) {
  metrics::MetricReport agg;
  agg.class_names = m.class_names;
  for (const FoldResult& f : folds) {
    agg.n_items += f.report.n_items;
  }
  if (folds.empty()) {
    return agg;
  }
  for (const auto& [name, first_value] : folds[0].report.values) {
    CompensatedSum sum;
    for (const FoldResult& f : folds) {
      sum.add(f.report.value_of(name));
    }
    agg.values.emplace_back(name, sum.value() / static_cast<double>(folds.size()));
  }
  return agg;
}

int modal_choice(const std::vector<FoldResult>& folds, std::size_t grid_size) {
  std::vector<std::size_t> counts(grid_size, 0);
  for (const FoldResult& f : folds) {
    ++counts[static_cast<std::size_t>(f.chosen_grid_index)];
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid_size; ++g) {
    if (counts[g] > counts[best]) best = g;
  }
  return static_cast<int>(best);
}

void fill_provenance(ExperimentResult& result, const ExperimentConfig& cfg,
                     const std::string& metric) {
  result.protocol = cfg.protocol;
  result.grid_size = cfg.grid.size();
  result.selection_metric = metric;
  result.seed = cfg.seed;
  result.config_hash = fnv1a64_hex(canonical_config(cfg));
}

}  // namespace

ExperimentResult run_cross_validation(const DatasetManifest& m,
                                      const store::EmbeddingSet& embeddings,
                                      const ExperimentConfig& cfg) {
  m.validate();
  cfg.validate();
  const std::vector<ResolvedItem> resolved = resolve_items(m, embeddings);

  int max_fold = 0;
  for (const ManifestItem& item : m.items) {
    if (!item.fold.has_value()) {
      throw ManifestError("cross-validation requires fold annotations; item '" +
                          item.clip_id + "' has none");
    }
    max_fold = std::max(max_fold, *item.fold);
  }
  const int k = cfg.cv_folds > 0 ? cfg.cv_folds : max_fold;
  if (k < 2) {
    throw ManifestError("cross-validation needs at least 2 folds, found " +
                        std::to_string(k));
  }
  if (max_fold > k) {
    throw ManifestError("fold id " + std::to_string(max_fold) +
                        " exceeds the configured fold count " + std::to_string(k));
  }

  std::vector<std::vector<std::size_t>> by_fold(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < m.items.size(); ++i) {
    by_fold[static_cast<std::size_t>(*m.items[i].fold - 1)].push_back(i);
  }
  for (int f = 0; f < k; ++f) {
    if (by_fold[static_cast<std::size_t>(f)].empty()) {
      throw ManifestError("missing fold ids: fold " + std::to_string(f + 1) +
                          " has no items");
    }
  }

  const std::string metric = default_metric(m, cfg);
  ExperimentResult result;
  fill_provenance(result, cfg, metric);
  for (int f = 0; f < k; ++f) {
    result.manifest_counts.push_back(by_fold[static_cast<std::size_t>(f)].size());
  }

  result.folds.resize(static_cast<std::size_t>(k));
  parallel_for(static_cast<std::size_t>(k), cfg.jobs, [&](std::size_t f) {
    FoldJob job;
    job.fold_id = static_cast<int>(f) + 1;
    job.fold_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(job.fold_id));
    job.test = by_fold[f];
    for (std::size_t other = 0; other < by_fold.size(); ++other) {
      if (other == f) continue;
      job.train.insert(job.train.end(), by_fold[other].begin(), by_fold[other].end());
    }
    std::sort(job.train.begin(), job.train.end());
    result.folds[f] = run_fold(m, resolved, cfg, metric, std::move(job),
                               /*grid_jobs=*/1);
  });

  result.aggregate = aggregate_folds(result.folds, m);
  result.chosen_grid_index = modal_choice(result.folds, cfg.grid.size());
  return result;
}

ExperimentResult run_split_experiment(const DatasetManifest& m,
                                      const store::EmbeddingSet& embeddings,
                                      const ExperimentConfig& cfg) {
  m.validate();
  cfg.validate();
  const std::vector<ResolvedItem> resolved = resolve_items(m, embeddings);

  FoldJob job;
  job.fold_id = 1;
  job.fold_seed = derive_seed(cfg.seed, 0);
  for (std::size_t i = 0; i < m.items.size(); ++i) {
    if (!m.items[i].split.has_value()) {
      throw ManifestError("split protocol requires split annotations; item '" +
                          m.items[i].clip_id + "' has none");
    }
    switch (*m.items[i].split) {
      case Split::kTrain: job.train.push_back(i); break;
      case Split::kVal: job.val.push_back(i); break;
      case Split::kTest: job.test.push_back(i); break;
    }
  }

  const std::string metric = default_metric(m, cfg);
  ExperimentResult result;
  fill_provenance(result, cfg, metric);
  result.manifest_counts = {job.train.size(), job.val.size(), job.test.size()};

  if (job.train.empty()) {
    throw ManifestError("empty split 'train'");
  }
  if (job.val.empty() && cfg.carve_val <= 0) {
    throw ManifestError("empty split 'val' (annotate items or set carve_val)");
  }
  if (job.test.empty()) {
    throw ManifestError("empty split 'test'");
  }

  result.folds.push_back(
      run_fold(m, resolved, cfg, metric, std::move(job), cfg.jobs));
  result.aggregate = aggregate_folds(result.folds, m);
  result.chosen_grid_index = result.folds[0].chosen_grid_index;
  return result;
}

ExperimentResult run_experiment(const DatasetManifest& m,
                                const store::EmbeddingSet& embeddings,
                                const ExperimentConfig& cfg) {
  return cfg.protocol == Protocol::kCrossValidation
             ? run_cross_validation(m, embeddings, cfg)
             : run_split_experiment(m, embeddings, cfg);
}

namespace {

std::string json_string(std::string_view s) {
  return nlohmann::json(std::string(s)).dump();
}

void append_metric_map(std::string& out, const metrics::MetricReport& report,
                       const std::string& indent) {
  out += "{";
  for (std::size_t i = 0; i < report.values.size(); ++i) {
    if (i > 0) out += ",";
    out += "\n" + indent + "  " + json_string(report.values[i].first) + ": " +
           metrics::format_fixed6(report.values[i].second);
  }
  out += report.values.empty() ? "}" : "\n" + indent + "}";
}

}  // namespace

std::string ExperimentResult::to_json() const {
  std::string out = "{\n";
  out += "  \"protocol\": " + json_string(protocol_name(protocol)) + ",\n";
  out += "  \"selection_metric\": " + json_string(selection_metric) + ",\n";
  out += "  \"seed\": " + std::to_string(seed) + ",\n";
  out += "  \"config_hash\": " + json_string(config_hash) + ",\n";
  out += "  \"grid_size\": " + std::to_string(grid_size) + ",\n";
  out += "  \"chosen_grid_index\": " + std::to_string(chosen_grid_index) + ",\n";
  out += "  \"manifest_counts\": [";
  for (std::size_t i = 0; i < manifest_counts.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(manifest_counts[i]);
  }
  out += "],\n";
  out += "  \"aggregate\": {\n    \"metrics\": ";
  {
    std::string metric_map;
    append_metric_map(metric_map, aggregate, "    ");
    out += metric_map;
  }
  out += ",\n    \"n_items\": " + std::to_string(aggregate.n_items) + "\n  },\n";
  out += "  \"folds\": [";
  for (std::size_t i = 0; i < folds.size(); ++i) {
    const FoldResult& f = folds[i];
    if (i > 0) out += ",";
    out += "\n    {\n";
    out += "      \"fold\": " + std::to_string(f.fold) + ",\n";
    out += "      \"n_train\": " + std::to_string(f.n_train) + ",\n";
    out += "      \"n_val\": " + std::to_string(f.n_val) + ",\n";
    out += "      \"n_test\": " + std::to_string(f.n_test) + ",\n";
    out += "      \"chosen_grid_index\": " + std::to_string(f.chosen_grid_index) +
           ",\n";
    out += "      \"validation_objective\": " +
           metrics::format_fixed6(f.validation_objective) + ",\n";
    out += "      \"best_epoch\": " + std::to_string(f.best_epoch) + ",\n";
    out += "      \"metrics\": ";
    std::string metric_map;
    append_metric_map(metric_map, f.report, "      ");
    out += metric_map;
    out += ",\n      \"skipped\": {";
    for (std::size_t s = 0; s < f.report.skipped.size(); ++s) {
      if (s > 0) out += ",";
      out += "\n        " + json_string(f.report.skipped[s].first) + ": [";
      const std::vector<std::size_t>& idxs = f.report.skipped[s].second;
      for (std::size_t j = 0; j < idxs.size(); ++j) {
        if (j > 0) out += ", ";
        const std::size_t c = idxs[j];
        out += json_string(c < f.report.class_names.size()
                               ? f.report.class_names[c]
                               : "class_" + std::to_string(c));
      }
      out += "]";
    }
    out += f.report.skipped.empty() ? "}" : "\n      }";
    out += "\n    }";
  }
  out += folds.empty() ? "]\n" : "\n  ]\n";
  out += "}\n";
  return out;
}

std::string ExperimentResult::folds_csv() const {
  std::string out = "fold";
  if (!folds.empty()) {
    for (const auto& [name, value] : folds[0].report.values) {
      out += "," + name;
    }
  }
  out += "\n";
  for (const FoldResult& f : folds) {
    out += std::to_string(f.fold);
    for (const auto& [name, value] : f.report.values) {
      out += "," + metrics::format_fixed6(value);
    }
    out += "\n";
  }
  return out;
}

}  // namespace probekit::harness
