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

#include <stdexcept>
#include <string>

namespace probekit {

// Usage errors are caller mistakes (bad flags, mismatched shapes, invalid
// configs); the CLI maps them to exit code 2 and everything else to 1.
class Error : public std::runtime_error {
 public:
  Error(const std::string& message, bool usage)
      : std::runtime_error(message), usage_(usage) {}
  bool is_usage() const { return usage_; }

 private:
  bool usage_;
};

#define PROBEKIT_DEFINE_ERROR(Name, usage_flag)                    \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& message)                      \
        : Error(std::string(#Name) + ": " + message, usage_flag) {} \
  }

PROBEKIT_DEFINE_ERROR(EmptyInput, true);
PROBEKIT_DEFINE_ERROR(InvalidConfig, true);
PROBEKIT_DEFINE_ERROR(DimMismatch, true);
PROBEKIT_DEFINE_ERROR(ShapeError, true);
PROBEKIT_DEFINE_ERROR(InvalidK, true);
PROBEKIT_DEFINE_ERROR(InvalidPerplexity, true);
PROBEKIT_DEFINE_ERROR(TooFewRows, true);
PROBEKIT_DEFINE_ERROR(LabelError, true);
PROBEKIT_DEFINE_ERROR(ManifestError, true);
PROBEKIT_DEFINE_ERROR(DomainError, false);
PROBEKIT_DEFINE_ERROR(ZeroWeight, false);
PROBEKIT_DEFINE_ERROR(FormatError, false);
PROBEKIT_DEFINE_ERROR(TruncatedFile, false);
PROBEKIT_DEFINE_ERROR(IoError, false);

#undef PROBEKIT_DEFINE_ERROR

}  // namespace probekit
