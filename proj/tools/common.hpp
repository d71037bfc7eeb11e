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
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace probekit::cli {

// ---------------------------------------------------------------------------
// Subcommand options (parsed in main.cpp, executed in cmd_*.cpp)
// ---------------------------------------------------------------------------

struct FeaturesOptions {
  std::string input_dir;
  std::string out_dir;
  int frame_rate = 40;
  int n_mels = 64;
  double window_length = 0.025;
  double fmin = 0.0;
  double fmax = 0.0;  // <= 0: canonical Nyquist
  bool augment = false;
  std::uint64_t seed = 0;
  int mask_freq_bins = 16;
  double mask_time_seconds = 2.0;
  int n_freq_masks = 1;
  int n_time_masks = 1;
  std::string mask_fill = "logfloor";  // logfloor | mean
  int jobs = 0;                        // 0 = hardware concurrency
};
void run_features(const FeaturesOptions& o);

struct EmbedOptions {
  std::string input_dir;
  std::string out_dir;
  std::string pool = "average";  // average | max
  std::string tag;               // source_tag stored on every embedding
};
void run_embed(const EmbedOptions& o);

struct ProbeTrainOptions {
  std::string manifest;
  std::string embeddings;
  std::string out_dir;
  double l2 = 0.0;
  int epochs = 100;
  double lr = 0.1;
  int batch = 0;
  double momentum = 0.9;
  int patience = 10;
  int halvings = 6;
  std::string val_metric;  // empty: task default
  std::uint64_t seed = 0;
};
void run_probe_train(const ProbeTrainOptions& o);

struct ProbePredictOptions {
  std::string model;
  std::string embeddings;
  std::string out_dir;
  std::string manifest;        // optional; enables labels and subsetting
  std::string subset = "all";  // all | train | val | test
};
void run_probe_predict(const ProbePredictOptions& o);

struct EvalOptions {
  std::string manifest;
  std::string embeddings;
  std::string out_dir;
  std::string protocol;  // cv | split; empty infers from the manifest
  std::string metric;    // selection metric; empty: task default
  std::vector<double> l2_grid;
  int epochs = 100;
  double lr = 0.1;
  int batch = 0;
  double momentum = 0.9;
  int patience = 10;
  int halvings = 6;
  int folds = 0;  // 0 infers from the manifest
  int carve_val = 0;
  int jobs = 0;
  std::uint64_t seed = 0;
};
void run_eval(const EvalOptions& o);

struct AnalyzeOptions {
  std::string model;
  std::string model_b;  // optional second model: cross-model similarity only
  std::string out_dir;
  std::string linkage = "average";
  std::string distance = "cosine";
  double perplexity = 0.0;  // <= 0: default 30 clamped to the class count
  int tsne_iters = 1000;
  double cut_height = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
};
void run_analyze(const AnalyzeOptions& o);

// ---------------------------------------------------------------------------
// Shared helpers (common.cpp)
// ---------------------------------------------------------------------------

// Reproducibility record written next to every run's outputs. The config
// hash covers command, options, seed, tool, and version; no timestamps.
struct Provenance {
  std::string command;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> options;  // canonical string forms
};
void write_provenance(const std::filesystem::path& out_dir, const Provenance& p);

void ensure_out_dir(const std::filesystem::path& dir);  // IoError on failure
void write_text_file(const std::filesystem::path& path, std::string_view text);

std::string json_escape(std::string_view s);
std::string csv_field(const std::string& s);
std::string canonical_double(double v);  // shortest round-trip decimal
std::string bool_name(bool v);

// Regular files in `dir` (non-recursive) whose extension case-insensitively
// matches `extension` (e.g. ".wav"), sorted by filename.
std::vector<std::filesystem::path> list_files_sorted(
    const std::filesystem::path& dir, std::string_view extension);

// Runs fn(i) for i in [0, n) on up to `jobs` threads (0 = hardware
// concurrency). Returns one message per index: empty on success, the
// exception text otherwise. Results are index-ordered, so output built from
// them is deterministic regardless of scheduling.
std::vector<std::string> run_parallel(std::size_t n, int jobs,
                                      const std::function<void(std::size_t)>& fn);

}  // namespace probekit::cli
