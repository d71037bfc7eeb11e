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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "probekit/task.hpp"

namespace probekit::harness {

enum class Split { kTrain, kVal, kTest };

std::string_view split_name(Split split);
Split split_from_name(std::string_view name);  // throws ManifestError

// One dataset item. Exactly one of fold (predefined cross-validation fold,
// 1-based) or split must be present, and exactly one of embedding_ref or
// audio_ref names where its features live.
struct ManifestItem {
  std::string clip_id;
  std::string embedding_ref;
  std::string audio_ref;
  std::vector<std::string> labels;  // class names
  std::optional<int> fold;
  std::optional<Split> split;
};

// A labeled dataset description: JSON-lines on disk, one header object
// {task, class_names} followed by one item object per line.
struct DatasetManifest {
  TaskKind task = TaskKind::kMulticlass;
  std::vector<std::string> class_names;
  std::vector<ManifestItem> items;

  // Position of a class name, or class_names.size() when absent.
  std::size_t class_index(std::string_view name) const;

  // Structural checks: unique non-empty clip_ids and class names, labels
  // drawn from class_names (LabelError), multiclass items carrying exactly
  // one label (LabelError), fold xor split per item, exactly one data ref,
  // folds >= 1 (ManifestError).
  void validate() const;
};

// Throws ManifestError on malformed files (with the offending line number),
// IoError when unreadable. The returned manifest has been validated.
DatasetManifest read_manifest(const std::filesystem::path& path);

// Validates, then writes the JSON-lines form. Byte-deterministic.
void write_manifest(const std::filesystem::path& path, const DatasetManifest& m);

}  // namespace probekit::harness
