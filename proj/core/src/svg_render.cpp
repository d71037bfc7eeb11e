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

#include "probekit/svg_render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "probekit/errors.hpp"
#include "probekit/metrics.hpp"  // format_fixed6

namespace probekit::analysis {

namespace {

constexpr const char* kPalette[] = {
    "#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2",
    "#eeca3b", "#b279a2", "#ff9da6", "#9d755d", "#bab0ac",
};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);
constexpr const char* kNeutralStroke = "#555555";
constexpr const char* kTextColor = "#222222";

std::string fmt2(double v) {
  if (v == 0.0) v = 0.0;  // collapse negative zero
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string svg_open(double width, double height) {
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"";
  out += fmt2(width);
  out += "\" height=\"";
  out += fmt2(height);
  out += "\" viewBox=\"0 0 ";
  out += fmt2(width);
  out += ' ';
  out += fmt2(height);
  out += "\" font-family=\"sans-serif\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  return out;
}

void append_text(std::string& out, double x, double y, const std::string& text,
                 double font_size, const char* fill, const char* anchor,
                 const char* extra = nullptr) {
  out += "<text x=\"";
  out += fmt2(x);
  out += "\" y=\"";
  out += fmt2(y);
  out += "\" font-size=\"";
  out += fmt2(font_size);
  out += "\" fill=\"";
  out += fill;
  out += "\" text-anchor=\"";
  out += anchor;
  out += '"';
  if (extra != nullptr) {
    out += ' ';
    out += extra;
  }
  out += '>';
  out += xml_escape(text);
  out += "</text>\n";
}

void append_line(std::string& out, double x1, double y1, double x2, double y2,
                 const char* stroke, double stroke_width,
                 const char* extra = nullptr) {
  out += "<line x1=\"";
  out += fmt2(x1);
  out += "\" y1=\"";
  out += fmt2(y1);
  out += "\" x2=\"";
  out += fmt2(x2);
  out += "\" y2=\"";
  out += fmt2(y2);
  out += "\" stroke=\"";
  out += stroke;
  out += "\" stroke-width=\"";
  out += fmt2(stroke_width);
  out += '"';
  if (extra != nullptr) {
    out += ' ';
    out += extra;
  }
  out += "/>\n";
}

double estimate_text_width(std::size_t chars, double font_size) {
  return static_cast<double>(chars) * font_size * 0.62;
}

std::size_t longest_name(const std::vector<std::string>& names) {
  std::size_t longest = 0;
  for (const auto& n : names) longest = std::max(longest, n.size());
  return longest;
}

// Diverging blue-white-red map for values in [-1, 1].
std::string diverging_color(double v) {
  v = std::clamp(v, -1.0, 1.0);
  // Endpoints: -1 -> #3b4cc0, 0 -> #ffffff, +1 -> #b40426.
  double r, g, b;
  if (v < 0.0) {
    const double t = -v;
    r = 255.0 + t * (0x3b - 255.0);
    g = 255.0 + t * (0x4c - 255.0);
    b = 255.0 + t * (0xc0 - 255.0);
  } else {
    const double t = v;
    r = 255.0 + t * (0xb4 - 255.0);
    g = 255.0 + t * (0x04 - 255.0);
    b = 255.0 + t * (0x26 - 255.0);
  }
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(std::lround(r)),
                static_cast<int>(std::lround(g)), static_cast<int>(std::lround(b)));
  return buf;
}

}  // namespace

std::string render_dendrogram(const Dendrogram& dendrogram,
                              const DendrogramStyle& style) {
  const std::size_t c = dendrogram.n_leaves;
  if (c == 0 || dendrogram.nodes.size() != 2 * c - 1 ||
      dendrogram.leaf_order.size() != c) {
    throw ShapeError("render_dendrogram: malformed dendrogram");
  }
  std::vector<std::string> leaf_names(c);
  for (std::size_t i = 0; i < c; ++i) {
    leaf_names[i] = dendrogram.nodes[i].name;
    if (leaf_names[i].empty()) {
      throw InvalidConfig("render_dendrogram: leaf " + std::to_string(i) +
                          " has an empty name");
    }
  }

  const double label_width =
      estimate_text_width(longest_name(leaf_names), style.font_size);
  const double x0 = style.margin + label_width + style.label_gap;
  const double width = x0 + style.tree_width + style.margin;
  const double height = 2.0 * style.margin +
                        (static_cast<double>(c) - 1.0) * style.leaf_spacing +
                        style.font_size;
  const double y0 = style.margin + style.font_size * 0.5;

  const double max_height =
      std::max(dendrogram.nodes.back().height, std::numeric_limits<double>::min());
  auto x_of = [&](double h) { return x0 + (h / max_height) * style.tree_width; };

  // Leaf slot in display order, then per-node y (children average).
  std::vector<std::size_t> slot(c);
  for (std::size_t pos = 0; pos < c; ++pos) slot[dendrogram.leaf_order[pos]] = pos;
  std::vector<double> node_y(dendrogram.nodes.size());
  for (std::size_t i = 0; i < dendrogram.nodes.size(); ++i) {
    const DendrogramNode& node = dendrogram.nodes[i];
    if (node.left < 0) {
      node_y[i] = y0 + static_cast<double>(slot[i]) * style.leaf_spacing;
    } else {
      node_y[i] = 0.5 * (node_y[static_cast<std::size_t>(node.left)] +
                         node_y[static_cast<std::size_t>(node.right)]);
    }
  }

  const bool has_cut = std::isfinite(style.cut_height);
  std::vector<std::size_t> cluster;
  if (has_cut) cluster = dendrogram.cut_height(style.cut_height);
  auto node_color = [&](std::size_t idx) -> const char* {
    if (!has_cut) return kNeutralStroke;
    const DendrogramNode& node = dendrogram.nodes[idx];
    if (node.left >= 0 && node.height > style.cut_height) return "#999999";
    return kPalette[cluster[node.min_leaf] % kPaletteSize];
  };

  std::string out = svg_open(width, height);

  // Leaf labels, colored by cluster when a cut is active.
  for (std::size_t pos = 0; pos < c; ++pos) {
    const std::size_t leaf = dendrogram.leaf_order[pos];
    const char* color = has_cut ? node_color(leaf) : kTextColor;
    append_text(out, style.margin, node_y[leaf] + style.font_size * 0.35,
                leaf_names[leaf], style.font_size, color, "start");
  }

  // Stub from each leaf label to its first merge position.
  for (std::size_t leaf = 0; leaf < c; ++leaf) {
    append_line(out, x0, node_y[leaf], x_of(0.0), node_y[leaf], node_color(leaf),
                1.5);
  }

  // Elbow connectors, one per merge: both children reach the merge height,
  // joined by a vertical segment.
  for (std::size_t i = c; i < dendrogram.nodes.size(); ++i) {
    const DendrogramNode& node = dendrogram.nodes[i];
    const auto l = static_cast<std::size_t>(node.left);
    const auto r = static_cast<std::size_t>(node.right);
    const double xp = x_of(node.height);
    const char* color = node_color(i);
    out += "<path d=\"M ";
    out += fmt2(x_of(dendrogram.nodes[l].height));
    out += ' ';
    out += fmt2(node_y[l]);
    out += " H ";
    out += fmt2(xp);
    out += " V ";
    out += fmt2(node_y[r]);
    out += " H ";
    out += fmt2(x_of(dendrogram.nodes[r].height));
    out += "\" fill=\"none\" stroke=\"";
    out += color;
    out += "\" stroke-width=\"1.5\"/>\n";
  }

  if (has_cut && style.cut_height >= 0.0 && style.cut_height <= max_height) {
    const double xc = x_of(style.cut_height);
    append_line(out, xc, style.margin, xc, height - style.margin, "#d62728", 1.0,
                "stroke-dasharray=\"4 3\"");
  }

  out += "</svg>\n";
  return out;
}

std::string render_heatmap(const SimilarityMatrix& matrix,
                           const HeatmapStyle& style) {
  const std::size_t rows = matrix.values.rows;
  const std::size_t cols = matrix.values.cols;
  if (rows == 0 || cols == 0 || matrix.row_names.size() != rows ||
      matrix.col_names.size() != cols) {
    throw ShapeError("render_heatmap: malformed similarity matrix");
  }
  for (const auto& n : matrix.row_names) {
    if (n.empty()) throw InvalidConfig("render_heatmap: empty row name");
  }
  for (const auto& n : matrix.col_names) {
    if (n.empty()) throw InvalidConfig("render_heatmap: empty column name");
  }

  const double row_label_width =
      estimate_text_width(longest_name(matrix.row_names), style.font_size);
  const double col_label_extent =
      estimate_text_width(longest_name(matrix.col_names), style.font_size) * 0.75;
  const double grid_x = style.margin + row_label_width + 6.0;
  const double grid_y = style.margin + col_label_extent + 6.0;
  const double width = grid_x + static_cast<double>(cols) * style.cell_size +
                       style.margin + col_label_extent * 0.5;
  const double height =
      grid_y + static_cast<double>(rows) * style.cell_size + style.margin;

  std::string out = svg_open(width, height);

  for (std::size_t j = 0; j < cols; ++j) {
    const double cx = grid_x + (static_cast<double>(j) + 0.5) * style.cell_size;
    const double cy = grid_y - 6.0;
    std::string rotate = "transform=\"rotate(-45 " + fmt2(cx) + ' ' + fmt2(cy) + ")\"";
    append_text(out, cx, cy, matrix.col_names[j], style.font_size, kTextColor,
                "start", rotate.c_str());
  }
  for (std::size_t i = 0; i < rows; ++i) {
    const double cy = grid_y + (static_cast<double>(i) + 0.5) * style.cell_size +
                      style.font_size * 0.35;
    append_text(out, grid_x - 6.0, cy, matrix.row_names[i], style.font_size,
                kTextColor, "end");
  }

  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = matrix.values.at(i, j);
      const double x = grid_x + static_cast<double>(j) * style.cell_size;
      const double y = grid_y + static_cast<double>(i) * style.cell_size;
      out += "<rect x=\"";
      out += fmt2(x);
      out += "\" y=\"";
      out += fmt2(y);
      out += "\" width=\"";
      out += fmt2(style.cell_size);
      out += "\" height=\"";
      out += fmt2(style.cell_size);
      out += "\" fill=\"";
      out += diverging_color(v);
      out += "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
      if (style.show_values) {
        const char* text_color = std::fabs(v) > 0.65 ? "#ffffff" : kTextColor;
        append_text(out, x + 0.5 * style.cell_size,
                    y + 0.5 * style.cell_size + style.font_size * 0.3,
                    metrics::format_fixed6(v).substr(0, 5), style.font_size * 0.6,
                    text_color, "middle");
      }
    }
  }

  out += "</svg>\n";
  return out;
}

std::string render_scatter(const Matrix& points,
                           const std::vector<std::string>& names,
                           const ScatterStyle& style) {
  if (points.rows == 0 || points.cols != 2) {
    throw ShapeError("render_scatter expects a non-empty C x 2 matrix");
  }
  if (!points.all_finite()) {
    throw DomainError("render_scatter: points contain a non-finite value");
  }
  const bool labeled = !names.empty();
  if (labeled) {
    if (names.size() != points.rows) {
      throw ShapeError("render_scatter: " + std::to_string(points.rows) +
                       " points but " + std::to_string(names.size()) + " names");
    }
    for (const auto& n : names) {
      if (n.empty()) throw InvalidConfig("render_scatter: empty point name");
    }
  }

  double min_x = points.at(0, 0), max_x = points.at(0, 0);
  double min_y = points.at(0, 1), max_y = points.at(0, 1);
  for (std::size_t i = 0; i < points.rows; ++i) {
    min_x = std::min(min_x, points.at(i, 0));
    max_x = std::max(max_x, points.at(i, 0));
    min_y = std::min(min_y, points.at(i, 1));
    max_y = std::max(max_y, points.at(i, 1));
  }
  const double span_x = std::max(max_x - min_x, 1e-12);
  const double span_y = std::max(max_y - min_y, 1e-12);
  const double inner_w = style.width - 2.0 * style.margin;
  const double inner_h = style.height - 2.0 * style.margin;
  auto px = [&](double x) { return style.margin + (x - min_x) / span_x * inner_w; };
  // SVG y grows downward; flip so larger coordinates render higher.
  auto py = [&](double y) {
    return style.height - style.margin - (y - min_y) / span_y * inner_h;
  };

  std::string out = svg_open(style.width, style.height);
  out += "<rect x=\"";
  out += fmt2(style.margin * 0.5);
  out += "\" y=\"";
  out += fmt2(style.margin * 0.5);
  out += "\" width=\"";
  out += fmt2(style.width - style.margin);
  out += "\" height=\"";
  out += fmt2(style.height - style.margin);
  out += "\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";

  for (std::size_t i = 0; i < points.rows; ++i) {
    const double x = px(points.at(i, 0));
    const double y = py(points.at(i, 1));
    out += "<circle cx=\"";
    out += fmt2(x);
    out += "\" cy=\"";
    out += fmt2(y);
    out += "\" r=\"";
    out += fmt2(style.point_radius);
    out += "\" fill=\"";
    out += kPalette[i % kPaletteSize];
    out += "\"/>\n";
    if (labeled) {
      append_text(out, x + style.point_radius + 3.0, y + style.font_size * 0.35,
                  names[i], style.font_size, kTextColor, "start");
    }
  }

  out += "</svg>\n";
  return out;
}

}  // namespace probekit::analysis
