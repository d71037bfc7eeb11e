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
#include <memory>

#include "CLI11.hpp"
#include "common.hpp"
#include "probekit/errors.hpp"
#include "probekit/version.hpp"

namespace probekit::cli {
namespace {

void register_features(CLI::App& app) {
  auto o = std::make_shared<FeaturesOptions>();
  CLI::App* sub = app.add_subcommand(
      "features", "Compute logmel feature matrices from a directory of WAV clips");
  sub->add_option("-i,--in", o->input_dir, "Directory of .wav clips")
      ->required()
      ->check(CLI::ExistingDirectory);
  sub->add_option("-o,--out", o->out_dir, "Output directory")->required();
  sub->add_option("--frame-rate", o->frame_rate, "Output frames per second")
      ->capture_default_str();
  sub->add_option("--mels", o->n_mels, "Mel bands per frame")->capture_default_str();
  sub->add_option("--window", o->window_length, "Analysis window in seconds")
      ->capture_default_str();
  sub->add_option("--fmin", o->fmin, "Lowest filterbank frequency in Hz")
      ->capture_default_str();
  sub->add_option("--fmax", o->fmax, "Highest filterbank frequency in Hz (0 = Nyquist)")
      ->capture_default_str();
  sub->add_flag("--augment", o->augment,
                "Apply masking augmentation to every spectrogram");
  sub->add_option("--seed", o->seed, "Base seed for augmentation masks")
      ->capture_default_str();
  sub->add_option("--mask-freq-bins", o->mask_freq_bins,
                  "Widest frequency mask in mel bins")
      ->capture_default_str();
  sub->add_option("--mask-time-seconds", o->mask_time_seconds,
                  "Longest time mask in seconds")
      ->capture_default_str();
  sub->add_option("--freq-masks", o->n_freq_masks, "Frequency masks per clip")
      ->capture_default_str();
  sub->add_option("--time-masks", o->n_time_masks, "Time masks per clip")
      ->capture_default_str();
  sub->add_option("--mask-fill", o->mask_fill,
                  "Masked-cell fill: logfloor or mean")
      ->capture_default_str();
  sub->add_option("-j,--jobs", o->jobs, "Worker threads (0 = all cores)")
      ->capture_default_str();
  sub->callback([o]() { run_features(*o); });
}

void register_embed(CLI::App& app) {
  auto o = std::make_shared<EmbedOptions>();
  CLI::App* sub = app.add_subcommand(
      "embed", "Pool frame matrices into clip embeddings (.aemb)");
  sub->add_option("-i,--in", o->input_dir, "Directory of .amat frame matrices")
      ->required()
      ->check(CLI::ExistingDirectory);
  sub->add_option("-o,--out", o->out_dir, "Output directory")->required();
  sub->add_option("--pool", o->pool, "Frame pooling: average or max")
      ->capture_default_str();
  sub->add_option("--tag", o->tag, "source_tag recorded on every embedding");
  sub->callback([o]() { run_embed(*o); });
}

void register_probe(CLI::App& app) {
  CLI::App* probe =
      app.add_subcommand("probe", "Train or apply a linear probe on embeddings");
  probe->require_subcommand(1);

  auto t = std::make_shared<ProbeTrainOptions>();
  CLI::App* train = probe->add_subcommand(
      "train", "Train a linear probe from a split manifest and embeddings");
  train->add_option("--manifest", t->manifest, "JSONL dataset manifest")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--embeddings", t->embeddings, "Embedding store (.aemb)")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("-o,--out", t->out_dir, "Output directory")->required();
  train->add_option("--l2", t->l2, "L2 penalty on the weight matrix")
      ->capture_default_str();
  train->add_option("--epochs", t->epochs, "Maximum training epochs")
      ->capture_default_str();
  train->add_option("--lr", t->lr, "Learning rate")->capture_default_str();
  train->add_option("--batch", t->batch, "Mini-batch size (0 = full batch)")
      ->capture_default_str();
  train->add_option("--momentum", t->momentum, "Gradient momentum")
      ->capture_default_str();
  train->add_option("--patience", t->patience,
                    "Epochs without validation gain before halving the step")
      ->capture_default_str();
  train->add_option("--halvings", t->halvings, "Step halvings before stopping")
      ->capture_default_str();
  train->add_option("--metric", t->val_metric,
                    "Validation metric (default: accuracy or lwlrap by task)");
  train->add_option("--seed", t->seed, "Shuffle seed")->capture_default_str();
  train->callback([t]() { run_probe_train(*t); });

  auto p = std::make_shared<ProbePredictOptions>();
  CLI::App* predict = probe->add_subcommand(
      "predict", "Score embeddings with a trained probe");
  predict->add_option("--model", p->model, "Trained probe (.aprb)")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--embeddings", p->embeddings, "Embedding store (.aemb)")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("-o,--out", p->out_dir, "Output directory")->required();
  predict->add_option("--manifest", p->manifest,
                      "Manifest supplying labels (enables report.json)")
      ->check(CLI::ExistingFile);
  predict->add_option("--subset", p->subset,
                      "Manifest subset to score: all, train, val, or test")
      ->capture_default_str();
  predict->callback([p]() { run_probe_predict(*p); });
}

void register_eval(CLI::App& app) {
  auto o = std::make_shared<EvalOptions>();
  CLI::App* sub = app.add_subcommand(
      "eval", "Run a cross-validation or fixed-split probe evaluation");
  sub->add_option("--manifest", o->manifest, "JSONL dataset manifest")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--embeddings", o->embeddings, "Embedding store (.aemb)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("-o,--out", o->out_dir, "Output directory")->required();
  sub->add_option("--protocol", o->protocol,
                  "cv or split (default: inferred from the manifest)");
  sub->add_option("--metric", o->metric,
                  "Selection metric (default: accuracy or lwlrap by task)");
  sub->add_option("--l2", o->l2_grid,
                  "L2 penalty; repeat the flag to sweep a grid");
  sub->add_option("--epochs", o->epochs, "Maximum training epochs")
      ->capture_default_str();
  sub->add_option("--lr", o->lr, "Learning rate")->capture_default_str();
  sub->add_option("--batch", o->batch, "Mini-batch size (0 = full batch)")
      ->capture_default_str();
  sub->add_option("--momentum", o->momentum, "Gradient momentum")
      ->capture_default_str();
  sub->add_option("--patience", o->patience,
                  "Epochs without validation gain before halving the step")
      ->capture_default_str();
  sub->add_option("--halvings", o->halvings, "Step halvings before stopping")
      ->capture_default_str();
  sub->add_option("--folds", o->folds, "Fold count (0 = inferred)")
      ->capture_default_str();
  sub->add_option("--carve-val", o->carve_val,
                  "Items carved from each training set for validation")
      ->capture_default_str();
  sub->add_option("-j,--jobs", o->jobs, "Worker threads (0 = all cores)")
      ->capture_default_str();
  sub->add_option("--seed", o->seed, "Experiment seed")->capture_default_str();
  sub->callback([o]() { run_eval(*o); });
}

void register_analyze(CLI::App& app) {
  auto o = std::make_shared<AnalyzeOptions>();
  CLI::App* sub = app.add_subcommand(
      "analyze", "Cluster and project a probe's per-class weight vectors");
  sub->add_option("--model", o->model, "Trained probe (.aprb)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--model-b", o->model_b,
                  "Second probe: cross-model similarity instead of clustering")
      ->check(CLI::ExistingFile);
  sub->add_option("-o,--out", o->out_dir, "Output directory")->required();
  sub->add_option("--linkage", o->linkage, "average, single, or complete")
      ->capture_default_str();
  sub->add_option("--distance", o->distance, "cosine or euclidean")
      ->capture_default_str();
  sub->add_option("--perplexity", o->perplexity,
                  "t-SNE perplexity (0 = 30 clamped to the class count)")
      ->capture_default_str();
  sub->add_option("--tsne-iters", o->tsne_iters, "t-SNE gradient iterations")
      ->capture_default_str();
  sub->add_option("--cut-height", o->cut_height,
                  "Color dendrogram clusters below this merge height");
  sub->add_option("--seed", o->seed, "t-SNE initialization seed")
      ->capture_default_str();
  sub->callback([o]() { run_analyze(*o); });
}

}  // namespace
}  // namespace probekit::cli

int main(int argc, char** argv) {
  CLI::App app{
      "probekit — train, evaluate, and analyze linear probes on stored "
      "audio/video embeddings"};
  app.require_subcommand(1);
  app.set_version_flag("--version", probekit::kVersion);
  app.set_config("--config", "", "Key-value config file; flags take precedence");

  probekit::cli::register_features(app);
  probekit::cli::register_embed(app);
  probekit::cli::register_probe(app);
  probekit::cli::register_eval(app);
  probekit::cli::register_analyze(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage error
  } catch (const probekit::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.is_usage() ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
