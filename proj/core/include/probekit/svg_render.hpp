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

#include <limits>
#include <string>
#include <vector>

#include "probekit/analysis.hpp"
#include "probekit/numeric.hpp"

namespace probekit::analysis {

// Self-contained SVG renderers. Output is deterministic: coordinates are
// printed with fixed precision and no timestamps or generated ids appear.

struct DendrogramStyle {
  double leaf_spacing = 22.0;  // vertical pixels per leaf
  double tree_width = 420.0;   // horizontal span of the merge-height axis
  double font_size = 12.0;
  double margin = 12.0;
  double label_gap = 8.0;      // gap between labels and the first link
  // Merges at heights <= cut_height are colored per cluster; links above the
  // cut are gray and a dashed marker is drawn at the cut. NaN disables this.
  double cut_height = std::numeric_limits<double>::quiet_NaN();
};

// Horizontal dendrogram: leaf labels on the left in display order, merge
// height increasing to the right. Throws InvalidConfig on empty leaf names.
std::string render_dendrogram(const Dendrogram& dendrogram,
                              const DendrogramStyle& style = {});

struct HeatmapStyle {
  double cell_size = 18.0;
  double font_size = 11.0;
  double margin = 12.0;
  bool show_values = false;  // print the value inside each cell
};

// Similarity heatmap with a diverging blue-white-red map over [-1, 1],
// row labels on the left and rotated column labels on top.
std::string render_heatmap(const SimilarityMatrix& matrix,
                           const HeatmapStyle& style = {});

struct ScatterStyle {
  double width = 560.0;
  double height = 560.0;
  double margin = 40.0;
  double font_size = 11.0;
  double point_radius = 3.5;
};

// 2-D scatter of `points` (C x 2). `names`, when non-empty, labels each
// point and must contain exactly C non-empty strings.
std::string render_scatter(const Matrix& points,
                           const std::vector<std::string>& names,
                           const ScatterStyle& style = {});

}  // namespace probekit::analysis
