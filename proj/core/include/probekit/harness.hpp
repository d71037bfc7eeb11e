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
#include <span>
#include <string>
#include <vector>

#include "probekit/embedding.hpp"
#include "probekit/manifest.hpp"
#include "probekit/metrics.hpp"
#include "probekit/probe.hpp"

namespace probekit::harness {

enum class Protocol {
  kCrossValidation,  // train on folds != i, evaluate on fold i, for each i
  kSplit,            // fixed train/val/test annotations
};

std::string_view protocol_name(Protocol p);
Protocol protocol_from_name(std::string_view name);  // throws InvalidConfig

struct ExperimentConfig {
  Protocol protocol = Protocol::kCrossValidation;
  // Cross-validation fold count; 0 infers the highest fold id in the
  // manifest. Folds 1..k must all be present.
  int cv_folds = 0;
  // Hyperparameter grid; every run trains with one of these. Must be
  // non-empty (a single default TrainConfig is the trivial grid).
  std::vector<probe::TrainConfig> grid;
  // Validation objective for grid selection and early stopping; empty picks
  // the task default (accuracy for multiclass, lwlrap for multilabel).
  std::string selection_metric;
  std::uint64_t seed = 0;
  // Items carved out of each training portion (seeded shuffle) to act as
  // validation when the manifest provides none. 0 = no carve; the training
  // data then doubles as the validation signal.
  int carve_val = 0;
  // Worker threads for folds / grid points. 0 = hardware concurrency.
  int jobs = 1;

  void validate() const;
};

// Which clip ids each phase of one fold touched; the leakage audit trail.
struct PhaseIds {
  std::vector<std::string> stats_fit;  // contributed to NormalizationStats
  std::vector<std::string> train;      // contributed training gradients
  std::vector<std::string> val;        // steered early stopping / selection
  std::vector<std::string> test;       // scored in the final report
};

// True when no test id appears in any earlier phase and no val id appears in
// stats_fit or train.
bool phases_leak_free(const PhaseIds& phases);

struct FoldResult {
  int fold = 0;  // 1-based fold id; 1 for the single split "fold"
  metrics::MetricReport report;  // computed on this fold's held-out items
  std::size_t n_train = 0;
  std::size_t n_val = 0;
  std::size_t n_test = 0;
  int chosen_grid_index = 0;
  double validation_objective = 0.0;
  int best_epoch = 0;
  PhaseIds phases;
};

struct ExperimentResult {
  Protocol protocol = Protocol::kCrossValidation;
  std::vector<FoldResult> folds;
  // values = arithmetic mean of the per-fold values, metric by metric.
  metrics::MetricReport aggregate;
  // SPLIT: the grid point chosen on validation. CV: the modal per-fold
  // choice (ties to the lower index).
  int chosen_grid_index = 0;
  std::size_t grid_size = 1;
  std::string selection_metric;
  std::uint64_t seed = 0;
  std::string config_hash;  // fnv1a64 hex of the canonical config
  // Item counts as annotated in the manifest (pre-carve): for SPLIT the
  // train/val/test counts; for CV one count per fold 1..k.
  std::vector<std::size_t> manifest_counts;

  std::string to_json() const;   // byte-stable document
  std::string folds_csv() const; // one row per fold, 6-decimal values
};

// Rank grid indices by objective, descending; ties keep grid order.
std::vector<std::size_t> sweep_order(std::span<const double> objectives);

// Deterministic canonical JSON of an experiment configuration (hash input).
std::string canonical_config(const ExperimentConfig& cfg);

// Evaluate the manifest's protocol. Embeddings are looked up by clip_id;
// every manifest item must resolve (ManifestError otherwise). Normalization
// statistics are always fitted on the training portion alone.
ExperimentResult run_cross_validation(const DatasetManifest& m,
                                      const store::EmbeddingSet& embeddings,
                                      const ExperimentConfig& cfg);
ExperimentResult run_split_experiment(const DatasetManifest& m,
                                      const store::EmbeddingSet& embeddings,
                                      const ExperimentConfig& cfg);

// Dispatch on cfg.protocol.
ExperimentResult run_experiment(const DatasetManifest& m,
                                const store::EmbeddingSet& embeddings,
                                const ExperimentConfig& cfg);

}  // namespace probekit::harness
