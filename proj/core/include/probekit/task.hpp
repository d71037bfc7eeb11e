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

#include <string_view>

namespace probekit {

enum class TaskKind {
  kMulticlass,  // exactly one label per item; softmax output
  kMultilabel,  // label set per item; independent sigmoid outputs
};

// "multiclass" / "multilabel".
std::string_view task_name(TaskKind task);

// Inverse of task_name; throws InvalidConfig for unknown names.
TaskKind task_from_name(std::string_view name);

}  // namespace probekit
