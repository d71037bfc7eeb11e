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

#include "common.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <thread>

#include "probekit/errors.hpp"
#include "probekit/hash.hpp"
#include "probekit/version.hpp"

namespace probekit::cli {

std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string canonical_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

std::string bool_name(bool v) { return v ? "true" : "false"; }

void ensure_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_provenance(const std::filesystem::path& out_dir, const Provenance& p) {
  std::string options = "{";
  bool first = true;
  for (const auto& [key, value] : p.options) {
    if (!first) options += ',';
    first = false;
    options += '"';
    options += json_escape(key);
    options += "\":\"";
    options += json_escape(value);
    options += '"';
  }
  options += '}';

  // The hash covers the document without the hash field itself.
  std::string hashed = "{\"command\":\"" + json_escape(p.command) +
                       "\",\"options\":" + options +
                       ",\"seed\":" + std::to_string(p.seed) +
                       ",\"tool\":\"probekit\",\"version\":\"" +
                       json_escape(kVersion) + "\"}";
  const std::string hash = fnv1a64_hex(hashed);

  std::string doc = "{\"command\":\"" + json_escape(p.command) +
                    "\",\"config_hash\":\"" + hash +
                    "\",\"options\":" + options +
                    ",\"seed\":" + std::to_string(p.seed) +
                    ",\"tool\":\"probekit\",\"version\":\"" +
                    json_escape(kVersion) + "\"}\n";
  write_text_file(out_dir / "provenance.json", doc);
}

std::vector<std::filesystem::path> list_files_sorted(
    const std::filesystem::path& dir, std::string_view extension) {
  if (!std::filesystem::is_directory(dir)) {
    throw InvalidConfig("'" + dir.string() + "' is not a directory");
  }
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
  };
  const std::string want = lower(std::string(extension));
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (lower(entry.path().extension().string()) == want) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    return a.filename().string() < b.filename().string();
  });
  return files;
}

std::vector<std::string> run_parallel(std::size_t n, int jobs,
                                      const std::function<void(std::size_t)>& fn) {
  std::vector<std::string> messages(n);
  if (n == 0) return messages;
  unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs)
                              : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

  auto body = [&](std::size_t i) {
    try {
      fn(i);
    } catch (const std::exception& e) {
      messages[i] = e.what();
    }
  };

  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return messages;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
  return messages;
}

}  // namespace probekit::cli
