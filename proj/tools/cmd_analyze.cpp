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

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "common.hpp"
#include "probekit/analysis.hpp"
#include "probekit/errors.hpp"
#include "probekit/metrics.hpp"
#include "probekit/probe.hpp"
#include "probekit/svg_render.hpp"

namespace probekit::cli {

void run_analyze(const AnalyzeOptions& o) {
  const analysis::Linkage linkage = analysis::linkage_from_name(o.linkage);
  const analysis::DistanceKind distance = analysis::distance_from_name(o.distance);
  if (o.tsne_iters < 1) throw InvalidConfig("--tsne-iters must be >= 1");

  const probe::ProbeModel model = probe::read_probe(o.model);
  const analysis::LabelVectorSet vectors =
      analysis::mv_normalize(analysis::extract_label_vectors(model));

  const std::filesystem::path out_dir(o.out_dir);
  ensure_out_dir(out_dir);

  if (!o.model_b.empty()) {
    // Cross-model comparison: similarity between the two label-vector sets.
    const probe::ProbeModel other = probe::read_probe(o.model_b);
    const analysis::LabelVectorSet vectors_b =
        analysis::mv_normalize(analysis::extract_label_vectors(other));
    const analysis::SimilarityMatrix sim =
        analysis::cosine_matrix(vectors, vectors_b);
    write_text_file(out_dir / "similarity.csv", sim.to_csv());
    write_text_file(out_dir / "heatmap.svg", analysis::render_heatmap(sim));
  } else {
    const analysis::SimilarityMatrix sim = analysis::cosine_matrix(vectors, vectors);
    write_text_file(out_dir / "similarity.csv", sim.to_csv());
    write_text_file(out_dir / "heatmap.svg", analysis::render_heatmap(sim));

    const analysis::Dendrogram dend =
        analysis::agglomerate(vectors, linkage, distance);
    write_text_file(out_dir / "dendrogram.json", dend.to_json());
    analysis::DendrogramStyle style;
    style.cut_height = o.cut_height;
    write_text_file(out_dir / "dendrogram.svg",
                    analysis::render_dendrogram(dend, style));

    const std::size_t c = vectors.size();
    if (c >= 4) {
      analysis::TsneConfig tsne_cfg;
      // An explicit perplexity is taken at face value (and may be rejected);
      // the default is clamped to the class count.
      tsne_cfg.perplexity = o.perplexity > 0.0
                                ? o.perplexity
                                : analysis::clamp_perplexity(30.0, c);
      tsne_cfg.iterations = o.tsne_iters;
      tsne_cfg.seed = o.seed;
      const Matrix coords = analysis::tsne(vectors, tsne_cfg);

      std::string csv = "name,x,y\n";
      for (std::size_t i = 0; i < c; ++i) {
        csv += csv_field(vectors.names[i]);
        csv += ',';
        csv += metrics::format_fixed6(coords.at(i, 0));
        csv += ',';
        csv += metrics::format_fixed6(coords.at(i, 1));
        csv += '\n';
      }
      write_text_file(out_dir / "tsne.csv", csv);
      write_text_file(out_dir / "tsne.svg",
                      analysis::render_scatter(coords, vectors.names));
    } else {
      std::fprintf(stderr, "note: t-SNE skipped (%zu classes, needs at least 4)\n",
                   c);
    }
  }

  Provenance prov;
  prov.command = "analyze";
  prov.seed = o.seed;
  prov.options = {
      {"cut_height", canonical_double(o.cut_height)},
      {"distance", o.distance},
      {"linkage", o.linkage},
      {"model", o.model},
      {"model_b", o.model_b},
      {"out", o.out_dir},
      {"perplexity", canonical_double(o.perplexity)},
      {"tsne_iters", std::to_string(o.tsne_iters)},
  };
  write_provenance(out_dir, prov);
}

}  // namespace probekit::cli
