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

#include "probekit/embedding.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "container.hpp"
#include "probekit/errors.hpp"
#include "probekit/numeric.hpp"

namespace probekit::store {

const Embedding* EmbeddingSet::find(std::string_view clip_id) const {
  const auto it = index_.find(std::string(clip_id));
  return it == index_.end() ? nullptr : &items_[it->second];
}

void EmbeddingSet::add(Embedding e) {
  if (e.vector.empty()) {
    throw InvalidConfig("embedding '" + e.clip_id + "' has no components");
  }
  if (dim_ == 0 && items_.empty()) {
    dim_ = e.vector.size();
  }
  if (e.vector.size() != dim_) {
    throw DimMismatch("embedding '" + e.clip_id + "' has dimension " +
                      std::to_string(e.vector.size()) + ", set has " +
                      std::to_string(dim_));
  }
  for (const float v : e.vector) {
    if (!std::isfinite(v)) {
      throw DomainError("embedding '" + e.clip_id + "' has a non-finite component");
    }
  }
  const auto [it, inserted] = index_.emplace(e.clip_id, items_.size());
  if (!inserted) {
    throw InvalidConfig("duplicate clip_id '" + e.clip_id + "' in embedding set");
  }
  items_.push_back(std::move(e));
}

NormalizationStats fit_normalizer(const EmbeddingSet& train, double epsilon) {
  if (train.empty()) {
    throw EmptyInput("cannot fit a normalizer on an empty embedding set");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidConfig("normalizer epsilon must be finite and > 0");
  }
  RunningMoments moments(train.dim());
  for (const Embedding& e : train.items()) {
    moments.add_row<float>(e.vector);
  }
  NormalizationStats stats;
  stats.mean = moments.mean();
  stats.stddev = moments.stddev(epsilon);
  stats.epsilon = epsilon;
  stats.fitted_on = static_cast<std::uint64_t>(train.size());
  return stats;
}

std::vector<double> whiten(const NormalizationStats& stats, const Embedding& e) {
  if (e.vector.size() != stats.dim()) {
    throw DimMismatch("embedding dimension " + std::to_string(e.vector.size()) +
                      " does not match normalizer dimension " +
                      std::to_string(stats.dim()));
  }
  std::vector<double> z(e.vector.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = (static_cast<double>(e.vector[i]) - stats.mean[i]) / stats.stddev[i];
  }
  return z;
}

NormalizeOutcome normalize(const NormalizationStats& stats, const Embedding& e) {
  std::vector<double> z = whiten(stats, e);
  const bool ok = l2_normalize(z);

  NormalizeOutcome outcome;
  outcome.degenerate = !ok;
  outcome.embedding.clip_id = e.clip_id;
  outcome.embedding.source_tag = e.source_tag;
  outcome.embedding.vector.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    outcome.embedding.vector[i] = ok ? static_cast<float>(z[i]) : 0.0f;
  }
  return outcome;
}

EmbeddingSet normalize_set(const NormalizationStats& stats, const EmbeddingSet& in,
                           std::vector<std::string>* degenerate_ids) {
  EmbeddingSet out(in.dim());
  for (const Embedding& e : in.items()) {
    NormalizeOutcome outcome = normalize(stats, e);
    if (outcome.degenerate && degenerate_ids != nullptr) {
      degenerate_ids->push_back(e.clip_id);
    }
    out.add(std::move(outcome.embedding));
  }
  return out;
}

namespace {
constexpr std::string_view kMagic = "AEMB";
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_embeddings(const std::filesystem::path& path, const EmbeddingSet& set) {
  std::vector<float> payload;
  payload.reserve(set.size() * set.dim());
  nlohmann::json clip_ids = nlohmann::json::array();
  nlohmann::json source_tags = nlohmann::json::array();
  for (const Embedding& e : set.items()) {
    payload.insert(payload.end(), e.vector.begin(), e.vector.end());
    clip_ids.push_back(e.clip_id);
    source_tags.push_back(e.source_tag);
  }
  nlohmann::json trailer;
  trailer["clip_ids"] = std::move(clip_ids);
  trailer["source_tags"] = std::move(source_tags);
  container::write_blob(path, kMagic, kVersion,
                        static_cast<std::uint32_t>(set.dim()),
                        static_cast<std::uint64_t>(set.size()),
                        container::bytes_from_f32(payload), trailer.dump());
}

EmbeddingSet read_embeddings(const std::filesystem::path& path) {
  const container::Blob blob = container::read_blob(path, kMagic, kVersion, 4);
  const std::vector<float> payload = container::f32_from_bytes(blob.payload);

  nlohmann::json trailer;
  try {
    trailer = nlohmann::json::parse(blob.trailer_json);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("'" + path.string() + "' has a malformed trailer: " + e.what());
  }
  if (!trailer.is_object() || !trailer.contains("clip_ids") ||
      !trailer["clip_ids"].is_array() ||
      trailer["clip_ids"].size() != blob.count) {
    throw FormatError("'" + path.string() +
                      "' trailer must map every position to a clip_id");
  }
  const bool has_tags = trailer.contains("source_tags") &&
                        trailer["source_tags"].is_array() &&
                        trailer["source_tags"].size() == blob.count;

  EmbeddingSet set(static_cast<std::size_t>(blob.dim));
  const std::size_t dim = static_cast<std::size_t>(blob.dim);
  for (std::size_t i = 0; i < blob.count; ++i) {
    const nlohmann::json& id = trailer["clip_ids"][i];
    if (!id.is_string()) {
      throw FormatError("'" + path.string() + "' trailer has a non-string clip_id");
    }
    Embedding e;
    e.clip_id = id.get<std::string>();
    if (has_tags && trailer["source_tags"][i].is_string()) {
      e.source_tag = trailer["source_tags"][i].get<std::string>();
    }
    e.vector.assign(payload.begin() + static_cast<std::ptrdiff_t>(i * dim),
                    payload.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
    set.add(std::move(e));
  }
  return set;
}

}  // namespace probekit::store
