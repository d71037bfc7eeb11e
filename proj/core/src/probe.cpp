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

#include "probekit/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "container.hpp"
#include "probekit/errors.hpp"
#include "probekit/log.hpp"
#include "probekit/metrics.hpp"
#include "probekit/rng.hpp"

namespace probekit {

std::string_view task_name(TaskKind task) {
  return task == TaskKind::kMulticlass ? "multiclass" : "multilabel";
}

TaskKind task_from_name(std::string_view name) {
  if (name == "multiclass") return TaskKind::kMulticlass;
  if (name == "multilabel") return TaskKind::kMultilabel;
  throw InvalidConfig("unknown task kind '" + std::string(name) + "'");
}

}  // namespace probekit

namespace probekit::probe {
namespace {

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void logits_for_row(const ProbeModel& model, std::span<const double> x,
                    std::span<double> z) {
  for (std::size_t c = 0; c < model.W.rows; ++c) {
    z[c] = dot(model.W.row(c), x) + model.b[c];
  }
}

void squash_in_place(TaskKind task, std::span<double> z) {
  if (task == TaskKind::kMulticlass) {
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
      v = std::exp(v - m);
      sum += v;
    }
    for (double& v : z) v /= sum;
  } else {
    for (double& v : z) v = sigmoid(v);
  }
}

}  // namespace

void ProbeModel::validate() const {
  const std::size_t c = W.rows;
  if (task == TaskKind::kMulticlass && c < 2) {
    throw InvalidConfig("a multiclass probe needs at least 2 classes");
  }
  if (c < 1) {
    throw InvalidConfig("a probe needs at least 1 class");
  }
  if (W.cols < 1) {
    throw InvalidConfig("a probe needs at least 1 input dimension");
  }
  if (b.size() != c || class_names.size() != c) {
    throw ShapeError("probe bias/class_names length must match the rows of W");
  }
  if (!W.all_finite()) {
    throw DomainError("probe weights contain a non-finite value");
  }
  for (const double v : b) {
    if (!std::isfinite(v)) {
      throw DomainError("probe bias contains a non-finite value");
    }
  }
}

void TrainConfig::validate() const {
  if (!(l2_lambda >= 0.0) || !std::isfinite(l2_lambda)) {
    throw InvalidConfig("l2_lambda must be finite and >= 0");
  }
  if (max_epochs < 0) {
    throw InvalidConfig("max_epochs must be >= 0");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidConfig("learning_rate must be finite and > 0");
  }
  if (batch_size < 0) {
    throw InvalidConfig("batch_size must be >= 0 (0 = full batch)");
  }
  if (!(momentum >= 0.0) || momentum >= 1.0) {
    throw InvalidConfig("momentum must lie in [0, 1)");
  }
  if (early_stop_patience < 0 || max_step_halvings < 0) {
    throw InvalidConfig("early_stop_patience and max_step_halvings must be >= 0");
  }
}

void LabeledData::validate() const {
  if (x.rows == 0) {
    throw EmptyInput("labeled data has no rows");
  }
  if (x.cols == 0) {
    throw ShapeError("labeled data has zero-dimensional features");
  }
  if (y.rows != x.rows) {
    throw ShapeError("feature and label matrices disagree on row count");
  }
  if (class_names.size() != y.cols || y.cols == 0) {
    throw ShapeError("label matrix columns must match class_names");
  }
  if (!clip_ids.empty() && clip_ids.size() != x.rows) {
    throw ShapeError("clip_ids length must match the row count");
  }
  if (!x.all_finite()) {
    throw DomainError("features contain a non-finite value");
  }
  for (std::size_t i = 0; i < y.rows; ++i) {
    int ones = 0;
    for (std::size_t c = 0; c < y.cols; ++c) {
      const double v = y.at(i, c);
      if (v != 0.0 && v != 1.0) {
        throw LabelError("labels must be 0/1 indicators");
      }
      ones += v == 1.0 ? 1 : 0;
    }
    if (task == TaskKind::kMulticlass && ones != 1) {
      throw LabelError("multiclass row " + std::to_string(i) +
                       " must have exactly one label, found " +
                       std::to_string(ones));
    }
  }
}

double loss_and_grad(const ProbeModel& model, const Matrix& x, const Matrix& y,
                     double l2_lambda, Matrix& grad_w, std::vector<double>& grad_b) {
  const std::size_t n = x.rows;
  const std::size_t c_count = model.W.rows;
  const std::size_t d = model.W.cols;
  if (n == 0) {
    throw EmptyInput("loss_and_grad needs a non-empty batch");
  }
  if (x.cols != d || y.rows != n || y.cols != c_count) {
    throw ShapeError("batch shapes do not match the model");
  }

  grad_w = Matrix(c_count, d);
  grad_b.assign(c_count, 0.0);
  CompensatedSum data_loss;
  std::vector<double> z(c_count);

  for (std::size_t i = 0; i < n; ++i) {
    const std::span<const double> xi = x.row(i);
    logits_for_row(model, xi, z);
    if (model.task == TaskKind::kMulticlass) {
      const double m = *std::max_element(z.begin(), z.end());
      double exp_sum = 0.0;
      for (const double v : z) exp_sum += std::exp(v - m);
      const double lse = m + std::log(exp_sum);
      for (std::size_t c = 0; c < c_count; ++c) {
        const double p = std::exp(z[c] - lse);
        const double g = p - y.at(i, c);
        grad_b[c] += g;
        double* gw = grad_w.row(c).data();
        for (std::size_t k = 0; k < d; ++k) gw[k] += g * xi[k];
        if (y.at(i, c) == 1.0) {
          data_loss.add(lse - z[c]);
        }
      }
    } else {
      for (std::size_t c = 0; c < c_count; ++c) {
        const double zc = z[c];
        const double yc = y.at(i, c);
        data_loss.add(softplus(zc) - yc * zc);
        const double g = sigmoid(zc) - yc;
        grad_b[c] += g;
        double* gw = grad_w.row(c).data();
        for (std::size_t k = 0; k < d; ++k) gw[k] += g * xi[k];
      }
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  for (double& v : grad_w.data) v *= inv_n;
  for (double& v : grad_b) v *= inv_n;

  double reg = 0.0;
  if (l2_lambda > 0.0) {
    CompensatedSum frob;
    for (std::size_t idx = 0; idx < grad_w.data.size(); ++idx) {
      const double w = model.W.data[idx];
      frob.add(w * w);
      grad_w.data[idx] += 2.0 * l2_lambda * w;
    }
    reg = l2_lambda * frob.value();
  }
  return data_loss.value() * inv_n + reg;
}

std::vector<double> predict(const ProbeModel& model, std::span<const double> x) {
  if (x.size() != model.W.cols) {
    throw DimMismatch("input dimension " + std::to_string(x.size()) +
                      " does not match probe dimension " +
                      std::to_string(model.W.cols));
  }
  std::vector<double> z(model.W.rows);
  logits_for_row(model, x, z);
  squash_in_place(model.task, z);
  return z;
}

std::vector<double> predict(const ProbeModel& model, const store::Embedding& e) {
  std::vector<double> x(e.vector.begin(), e.vector.end());
  return predict(model, x);
}

Matrix predict_batch(const ProbeModel& model, const Matrix& x) {
  if (x.cols != model.W.cols) {
    throw DimMismatch("input dimension " + std::to_string(x.cols) +
                      " does not match probe dimension " +
                      std::to_string(model.W.cols));
  }
  Matrix out(x.rows, model.W.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const std::span<double> row = out.row(i);
    logits_for_row(model, x.row(i), row);
    squash_in_place(model.task, row);
  }
  return out;
}

namespace {

double validation_metric(const std::string& name, const ProbeModel& model,
                         const LabeledData& val) {
  metrics::ScoreTable table;
  table.scores = predict_batch(model, val.x);
  table.truths = val.y;
  table.class_names = val.class_names;
  return metrics::metric_by_name(name, table);
}

}  // namespace

TrainResult train_probe(const LabeledData& train, const LabeledData& val,
                        const TrainConfig& cfg) {
  cfg.validate();
  train.validate();
  if (!val.empty()) {
    val.validate();
    if (val.task != train.task) {
      throw LabelError("train and validation task kinds differ");
    }
    if (val.class_names != train.class_names) {
      throw LabelError("train and validation class sets differ");
    }
    if (val.x.cols != train.x.cols) {
      throw DimMismatch("train and validation feature dimensions differ");
    }
  }
  const LabeledData& val_used = val.empty() ? train : val;
  const std::string metric_name =
      !cfg.val_metric.empty()
          ? cfg.val_metric
          : std::string(train.task == TaskKind::kMulticlass ? "accuracy" : "lwlrap");

  const std::size_t n = train.size();
  const std::size_t c_count = train.y.cols;
  const std::size_t d = train.x.cols;

  ProbeModel model;
  model.W = Matrix(c_count, d);
  model.b.assign(c_count, 0.0);
  model.task = train.task;
  model.class_names = train.class_names;

  TrainResult result;
  result.model = model;
  result.best_val_metric = validation_metric(metric_name, model, val_used);
  result.best_epoch = 0;

  Matrix vel_w(c_count, d);
  std::vector<double> vel_b(c_count, 0.0);
  Matrix grad_w;
  std::vector<double> grad_b;

  const std::size_t batch =
      cfg.batch_size == 0 ? n : std::min<std::size_t>(cfg.batch_size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(cfg.seed);

  Matrix batch_x;
  Matrix batch_y;
  double lr = cfg.learning_rate;
  int stall = 0;
  int halvings = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    if (batch < n) {
      shuffle_in_place(rng, order);
    }
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(start + batch, n);
      const Matrix* px = &train.x;
      const Matrix* py = &train.y;
      if (batch < n) {
        const std::size_t rows = stop - start;
        batch_x = Matrix(rows, d);
        batch_y = Matrix(rows, c_count);
        for (std::size_t r = 0; r < rows; ++r) {
          const std::size_t src = order[start + r];
          std::copy_n(train.x.row(src).data(), d, batch_x.row(r).data());
          std::copy_n(train.y.row(src).data(), c_count, batch_y.row(r).data());
        }
        px = &batch_x;
        py = &batch_y;
      }
      loss_and_grad(model, *px, *py, cfg.l2_lambda, grad_w, grad_b);
      for (std::size_t idx = 0; idx < vel_w.data.size(); ++idx) {
        vel_w.data[idx] = cfg.momentum * vel_w.data[idx] - lr * grad_w.data[idx];
        model.W.data[idx] += vel_w.data[idx];
      }
      for (std::size_t c = 0; c < c_count; ++c) {
        vel_b[c] = cfg.momentum * vel_b[c] - lr * grad_b[c];
        model.b[c] += vel_b[c];
      }
    }

    result.train_loss.push_back(
        loss_and_grad(model, train.x, train.y, cfg.l2_lambda, grad_w, grad_b));
    const double vm = validation_metric(metric_name, model, val_used);
    result.val_history.push_back(vm);
    result.epochs_run = epoch;

    if (vm > result.best_val_metric) {
      result.best_val_metric = vm;
      result.best_epoch = epoch;
      result.model = model;
      stall = 0;
    } else if (cfg.early_stop_patience > 0) {
      if (++stall >= cfg.early_stop_patience) {
        ++halvings;
        if (halvings > cfg.max_step_halvings) {
          PK_DEBUG("stopping at epoch %d after %d step halvings", epoch, halvings - 1);
          break;
        }
        lr *= 0.5;
        stall = 0;
        PK_DEBUG("halving step to %g at epoch %d", lr, epoch);
      }
    }
  }
  return result;
}

namespace {
constexpr std::string_view kMagic = "APRB";
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_probe(const std::filesystem::path& path, const ProbeModel& model) {
  model.validate();
  const std::size_t c_count = model.W.rows;
  const std::size_t d = model.W.cols;
  std::vector<double> payload;
  payload.reserve(c_count * (d + 1));
  for (std::size_t c = 0; c < c_count; ++c) {
    const std::span<const double> row = model.W.row(c);
    payload.insert(payload.end(), row.begin(), row.end());
    payload.push_back(model.b[c]);
  }
  nlohmann::json trailer;
  trailer["task"] = std::string(task_name(model.task));
  trailer["class_names"] = model.class_names;
  container::write_blob(path, kMagic, kVersion, static_cast<std::uint32_t>(d + 1),
                        static_cast<std::uint64_t>(c_count),
                        container::bytes_from_f64(payload), trailer.dump());
}

ProbeModel read_probe(const std::filesystem::path& path) {
  const container::Blob blob = container::read_blob(path, kMagic, kVersion, 8);
  if (blob.dim < 2) {
    throw FormatError("'" + path.string() + "' stores a probe without features");
  }
  const std::size_t d = blob.dim - 1;
  const std::size_t c_count = static_cast<std::size_t>(blob.count);
  const std::vector<double> payload = container::f64_from_bytes(blob.payload);

  nlohmann::json trailer;
  try {
    trailer = nlohmann::json::parse(blob.trailer_json);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("'" + path.string() + "' has a malformed trailer: " + e.what());
  }
  if (!trailer.is_object() || !trailer.contains("task") ||
      !trailer["task"].is_string() || !trailer.contains("class_names") ||
      !trailer["class_names"].is_array() ||
      trailer["class_names"].size() != c_count) {
    throw FormatError("'" + path.string() + "' trailer is missing task/class_names");
  }

  ProbeModel model;
  try {
    model.task = task_from_name(trailer["task"].get<std::string>());
  } catch (const Error&) {
    throw FormatError("'" + path.string() + "' names an unknown task kind");
  }
  model.W = Matrix(c_count, d);
  model.b.resize(c_count);
  for (std::size_t c = 0; c < c_count; ++c) {
    const double* src = payload.data() + c * (d + 1);
    std::copy_n(src, d, model.W.row(c).data());
    model.b[c] = src[d];
  }
  for (const nlohmann::json& name : trailer["class_names"]) {
    if (!name.is_string()) {
      throw FormatError("'" + path.string() + "' has a non-string class name");
    }
    model.class_names.push_back(name.get<std::string>());
  }
  try {
    model.validate();
  } catch (const Error& e) {
    throw FormatError("'" + path.string() + "' stores an invalid probe: " + e.what());
  }
  return model;
}

}  // namespace probekit::probe
