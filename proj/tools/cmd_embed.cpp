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
#include <string>
#include <vector>

#include "common.hpp"
#include "probekit/embedding.hpp"
#include "probekit/errors.hpp"
#include "probekit/matrix_io.hpp"
#include "probekit/pooling.hpp"

namespace probekit::cli {

void run_embed(const EmbedOptions& o) {
  if (o.pool != "average" && o.pool != "max") {
    throw InvalidConfig("unknown pool '" + o.pool + "' (expected average or max)");
  }

  const std::filesystem::path in_dir(o.input_dir);
  const std::filesystem::path out_dir(o.out_dir);
  const std::vector<std::filesystem::path> mats = list_files_sorted(in_dir, ".amat");
  if (mats.empty()) {
    throw InvalidConfig("no .amat files found in '" + in_dir.string() + "'");
  }
  ensure_out_dir(out_dir);

  store::EmbeddingSet set;
  std::size_t failed = 0;
  for (const auto& path : mats) {
    try {
      const store::FrameMatrix frames = store::read_frame_matrix(path);
      pooling::FrameSequence seq{frames.values, frames.frame_rate};
      const std::vector<double> pooled = o.pool == "average"
                                             ? pooling::average_pool(seq)
                                             : pooling::max_pool(seq);
      store::Embedding e;
      e.vector.reserve(pooled.size());
      for (double v : pooled) e.vector.push_back(static_cast<float>(v));
      e.clip_id = frames.clip_id;
      e.source_tag = o.tag;
      set.add(std::move(e));
    } catch (const Error& err) {
      if (err.is_usage()) throw;  // mixed dimensions / duplicate ids
      ++failed;
      std::fprintf(stderr, "warning: %s: %s\n", path.filename().string().c_str(),
                   err.what());
    }
  }
  if (set.empty()) {
    throw IoError("all " + std::to_string(failed) + " input files failed");
  }
  store::write_embeddings(out_dir / "embeddings.aemb", set);

  Provenance prov;
  prov.command = "embed";
  prov.options = {
      {"in", o.input_dir},
      {"out", o.out_dir},
      {"pool", o.pool},
      {"tag", o.tag},
  };
  write_provenance(out_dir, prov);

  if (failed > 0) {
    std::fprintf(stderr, "note: %zu of %zu matrices failed\n", failed, mats.size());
  }
}

}  // namespace probekit::cli
