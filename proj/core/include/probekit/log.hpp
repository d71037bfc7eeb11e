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

namespace probekit {

enum class LogLevel { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3, kOff = 4 };

// Level comes from PROBEKIT_LOG (debug|info|warn|error|off) on first use;
// defaults to warn. Messages go to stderr, never to result files.
LogLevel log_level();
void set_log_level(LogLevel level);

#if defined(__GNUC__)
__attribute__((format(printf, 2, 3)))
#endif
void log_message(LogLevel level, const char* fmt, ...);

}  // namespace probekit

#define PK_DEBUG(...) ::probekit::log_message(::probekit::LogLevel::kDebug, __VA_ARGS__)
#define PK_INFO(...) ::probekit::log_message(::probekit::LogLevel::kInfo, __VA_ARGS__)
#define PK_WARN(...) ::probekit::log_message(::probekit::LogLevel::kWarn, __VA_ARGS__)
#define PK_ERROR(...) ::probekit::log_message(::probekit::LogLevel::kError, __VA_ARGS__)
