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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "probekit/embedding.hpp"
#include "probekit/numeric.hpp"
#include "probekit/task.hpp"

namespace probekit::probe {

using probekit::TaskKind;

// Linear probe: scores = W x + b, squashed per the task kind.
struct ProbeModel {
  Matrix W;  // C x D
  std::vector<double> b;  // C
  TaskKind task = TaskKind::kMulticlass;
  std::vector<std::string> class_names;  // row c of W scores class_names[c]

  std::size_t n_classes() const { return W.rows; }
  std::size_t dim() const { return W.cols; }
  void validate() const;  // throws InvalidConfig / ShapeError
};

struct TrainConfig {
  double l2_lambda = 0.0;
  int max_epochs = 100;
  double learning_rate = 0.1;
  int batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 0;
  // Epochs without validation improvement before the step is halved; after
  // max_step_halvings further stalls training stops. 0 disables both.
  int early_stop_patience = 10;
  int max_step_halvings = 6;
  double momentum = 0.9;
  // Validation selection metric name (see metrics::metric_by_name); empty
  // picks the task default: accuracy (multiclass) or lwlrap (multilabel).
  std::string val_metric;

  void validate() const;
};

// Dense labeled design matrix. Rows of `x` are (already normalized)
// embeddings; rows of `y` are binary label indicators, one-hot for
// multiclass tasks.
struct LabeledData {
  Matrix x;  // N x D
  Matrix y;  // N x C
  TaskKind task = TaskKind::kMulticlass;
  std::vector<std::string> class_names;
  std::vector<std::string> clip_ids;  // optional; aligned with rows when present

  std::size_t size() const { return x.rows; }
  bool empty() const { return x.rows == 0; }
  void validate() const;  // throws LabelError / ShapeError / EmptyInput
};

struct TrainResult {
  ProbeModel model;  // snapshot from the epoch with the best validation metric
  double best_val_metric = 0.0;
  int best_epoch = 0;      // 0 = the zero-initialized model
  int epochs_run = 0;
  std::vector<double> train_loss;  // full-data loss after each epoch
  std::vector<double> val_history; // validation metric after each epoch
};

// Regularized objective and its exact analytic gradient on one batch:
// multiclass: mean_i cross-entropy(softmax(W x_i + b), y_i)
// multilabel: mean_i sum_c bce(sigmoid(w_c x_i + b_c), y_ic)
// plus l2_lambda * ||W||_F^2 (bias unregularized).
double loss_and_grad(const ProbeModel& model, const Matrix& x, const Matrix& y,
                     double l2_lambda, Matrix& grad_w, std::vector<double>& grad_b);

// Probabilities for one embedding: softmax(Wx+b) or componentwise sigmoid.
std::vector<double> predict(const ProbeModel& model, std::span<const double> x);
std::vector<double> predict(const ProbeModel& model, const store::Embedding& e);

// Row i = predict(model, x.row(i)).
Matrix predict_batch(const ProbeModel& model, const Matrix& x);

// Mini-batch gradient descent with momentum from a zero-initialized model,
// halving the step when the validation metric stalls. Returns the snapshot
// with the best validation metric. Deterministic given cfg.seed. When `val`
// is empty the training set doubles as the validation set.
TrainResult train_probe(const LabeledData& train, const LabeledData& val,
                        const TrainConfig& cfg);

// Model container ("APRB"): float64 payload of C rows x (D+1) columns, each
// row [w_c | b_c]; trailer stores task kind and class names.
void write_probe(const std::filesystem::path& path, const ProbeModel& model);
ProbeModel read_probe(const std::filesystem::path& path);

}  // namespace probekit::probe
