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

#include "probekit/manifest.hpp"

#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "probekit/errors.hpp"

namespace probekit::harness {

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Split split_from_name(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw ManifestError("unknown split '" + std::string(name) +
                      "' (expected train/val/test)");
}

std::size_t DatasetManifest::class_index(std::string_view name) const {
  for (std::size_t i = 0; i < class_names.size(); ++i) {
    if (class_names[i] == name) return i;
  }
  return class_names.size();
}

void DatasetManifest::validate() const {
  if (class_names.empty()) {
    throw ManifestError("manifest declares no classes");
  }
  {
    std::unordered_set<std::string> seen;
    for (const std::string& name : class_names) {
      if (name.empty()) {
        throw ManifestError("manifest has an empty class name");
      }
      if (!seen.insert(name).second) {
        throw ManifestError("duplicate class name '" + name + "'");
      }
    }
  }
  std::unordered_set<std::string> ids;
  for (const ManifestItem& item : items) {
    if (item.clip_id.empty()) {
      throw ManifestError("manifest item with an empty clip_id");
    }
    if (!ids.insert(item.clip_id).second) {
      throw ManifestError("duplicate clip_id '" + item.clip_id + "'");
    }
    if (item.fold.has_value() == item.split.has_value()) {
      throw ManifestError("item '" + item.clip_id +
                          "' must carry exactly one of fold or split");
    }
    if (item.fold.has_value() && *item.fold < 1) {
      throw ManifestError("item '" + item.clip_id + "' has fold " +
                          std::to_string(*item.fold) + "; folds are 1-based");
    }
    if (item.embedding_ref.empty() == item.audio_ref.empty()) {
      throw ManifestError("item '" + item.clip_id +
                          "' must carry exactly one of embedding_ref or audio_ref");
    }
    for (const std::string& label : item.labels) {
      if (class_index(label) == class_names.size()) {
        throw LabelError("item '" + item.clip_id + "' uses unknown label '" +
                         label + "'");
      }
    }
    {
      std::unordered_set<std::string> uniq(item.labels.begin(), item.labels.end());
      if (uniq.size() != item.labels.size()) {
        throw LabelError("item '" + item.clip_id + "' repeats a label");
      }
    }
    if (task == TaskKind::kMulticlass && item.labels.size() != 1) {
      throw LabelError("multiclass item '" + item.clip_id + "' must have exactly " +
                       "one label, found " + std::to_string(item.labels.size()));
    }
  }
}

namespace {

nlohmann::json parse_line(const std::string& line, std::size_t line_no,
                          const std::filesystem::path& path) {
  try {
    nlohmann::json j = nlohmann::json::parse(line);
    if (!j.is_object()) {
      throw ManifestError("line " + std::to_string(line_no) + " of '" +
                          path.string() + "' is not a JSON object");
    }
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError("line " + std::to_string(line_no) + " of '" +
                        path.string() + "' is not valid JSON: " + e.what());
  }
}

std::string get_string(const nlohmann::json& j, const char* key,
                       std::size_t line_no) {
  if (!j.contains(key)) return {};
  if (!j[key].is_string()) {
    throw ManifestError("line " + std::to_string(line_no) + ": '" +
                        std::string(key) + "' must be a string");
  }
  return j[key].get<std::string>();
}

}  // namespace

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open manifest '" + path.string() + "'");
  }

  DatasetManifest manifest;
  bool have_header = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;  // blank line
    }
    const nlohmann::json j = parse_line(line, line_no, path);

    if (!have_header) {
      if (!j.contains("task") || !j["task"].is_string() ||
          !j.contains("class_names") || !j["class_names"].is_array()) {
        throw ManifestError("'" + path.string() +
                            "' must start with a header {task, class_names}");
      }
      try {
        manifest.task = task_from_name(j["task"].get<std::string>());
      } catch (const Error& e) {
        throw ManifestError("'" + path.string() + "' header: " + e.what());
      }
      for (const nlohmann::json& name : j["class_names"]) {
        if (!name.is_string()) {
          throw ManifestError("'" + path.string() +
                              "' header has a non-string class name");
        }
        manifest.class_names.push_back(name.get<std::string>());
      }
      have_header = true;
      continue;
    }

    ManifestItem item;
    item.clip_id = get_string(j, "clip_id", line_no);
    item.embedding_ref = get_string(j, "embedding_ref", line_no);
    item.audio_ref = get_string(j, "audio_ref", line_no);
    if (j.contains("labels")) {
      if (!j["labels"].is_array()) {
        throw ManifestError("line " + std::to_string(line_no) +
                            ": 'labels' must be an array");
      }
      for (const nlohmann::json& label : j["labels"]) {
        if (!label.is_string()) {
          throw ManifestError("line " + std::to_string(line_no) +
                              ": labels must be strings");
        }
        item.labels.push_back(label.get<std::string>());
      }
    }
    if (j.contains("fold")) {
      if (!j["fold"].is_number_integer()) {
        throw ManifestError("line " + std::to_string(line_no) +
                            ": 'fold' must be an integer");
      }
      item.fold = j["fold"].get<int>();
    }
    if (j.contains("split")) {
      if (!j["split"].is_string()) {
        throw ManifestError("line " + std::to_string(line_no) +
                            ": 'split' must be a string");
      }
      item.split = split_from_name(j["split"].get<std::string>());
    }
    manifest.items.push_back(std::move(item));
  }
  if (!have_header) {
    throw ManifestError("'" + path.string() + "' is empty; expected a header line");
  }
  manifest.validate();
  return manifest;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
  m.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  nlohmann::json header;
  header["task"] = std::string(task_name(m.task));
  header["class_names"] = m.class_names;
  out << header.dump() << "\n";
  for (const ManifestItem& item : m.items) {
    nlohmann::json j;
    j["clip_id"] = item.clip_id;
    if (!item.embedding_ref.empty()) j["embedding_ref"] = item.embedding_ref;
    if (!item.audio_ref.empty()) j["audio_ref"] = item.audio_ref;
    j["labels"] = item.labels;
    if (item.fold.has_value()) j["fold"] = *item.fold;
    if (item.split.has_value()) j["split"] = std::string(split_name(*item.split));
    out << j.dump() << "\n";
  }
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

}  // namespace probekit::harness
