// Copyright 2026 The MSA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "msa/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "csv_util.h"
#include "msa/errors.h"

namespace msa {
namespace {

constexpr int kCell = 24;
constexpr int kLeftMargin = 120;
constexpr int kTopMargin = 90;

// End points of the diverging ramp.
constexpr int kPositive[3] = {0xB2, 0x18, 0x2B};
constexpr int kNegative[3] = {0x21, 0x66, 0xAC};

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string DivergingColor(double v, double max_abs) {
  double t = max_abs > 0.0 ? std::clamp(v / max_abs, -1.0, 1.0) : 0.0;
  const int* end = t >= 0.0 ? kPositive : kNegative;
  t = std::abs(t);
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c) {
    rgb[c] = static_cast<int>(std::lround(255.0 + (end[c] - 255.0) * t));
  }
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string RenderHeatmapSvg(const Heatmap& h) {
  if (h.rows == 0 || h.cols == 0 || h.values.empty()) {
    throw InvalidArgument("cannot render an empty matrix");
  }
  if (h.values.size() != h.rows * h.cols || h.row_labels.size() != h.rows ||
      h.col_labels.size() != h.cols) {
    throw ShapeMismatch("heatmap values or labels do not match its shape");
  }
  double max_abs = 0.0;
  for (double v : h.values) {
    if (!std::isfinite(v)) throw NonFiniteValue("non-finite heatmap value");
    max_abs = std::max(max_abs, std::abs(v));
  }
  const int width = kLeftMargin + static_cast<int>(h.cols) * kCell + 20;
  const int height = kTopMargin + static_cast<int>(h.rows) * kCell + 20;
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\" data-rows=\"" << h.rows << "\" data-cols=\"" << h.cols
      << "\" data-max-abs=\"" << internal::FormatDouble(max_abs) << "\">\n"
      << "<title>" << Escape(h.title) << "</title>\n"
      << "<text x=\"" << kLeftMargin << "\" y=\"20\" font-family=\"sans-serif\" "
      << "font-size=\"14\">" << Escape(h.title) << "</text>\n";
  for (std::size_t c = 0; c < h.cols; ++c) {
    const int x = kLeftMargin + static_cast<int>(c) * kCell + kCell / 2;
    svg << "<text x=\"" << x << "\" y=\"" << kTopMargin - 6
        << "\" font-family=\"sans-serif\" font-size=\"10\" transform=\"rotate(-60 "
        << x << " " << kTopMargin - 6 << ")\">" << Escape(h.col_labels[c])
        << "</text>\n";
  }
  for (std::size_t r = 0; r < h.rows; ++r) {
    const int y = kTopMargin + static_cast<int>(r) * kCell;
    svg << "<text x=\"" << kLeftMargin - 6 << "\" y=\"" << y + kCell / 2 + 4
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">"
        << Escape(h.row_labels[r]) << "</text>\n";
    for (std::size_t c = 0; c < h.cols; ++c) {
      const double v = h.values[r * h.cols + c];
      svg << "<rect x=\"" << kLeftMargin + static_cast<int>(c) * kCell
          << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\"" << kCell
          << "\" fill=\"" << DivergingColor(v, max_abs) << "\" data-row=\"" << r
          << "\" data-col=\"" << c << "\" data-value=\""
          << internal::FormatDouble(v) << "\"/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

Heatmap ContributionHeatmap(const ContributionMatrix& m) {
  m.Validate();
  Heatmap h;
  h.title = "Contributions (players x functions)";
  h.row_labels = m.player_labels;
  h.col_labels = m.function_labels;
  h.rows = m.players;
  h.cols = m.functions;
  h.values = m.values;
  return h;
}

Heatmap SimilarityHeatmap(const SimilarityMatrix& s) {
  Heatmap h;
  h.title = "Inter-function similarity (Pearson)";
  h.row_labels = s.labels;
  h.col_labels = s.labels;
  h.rows = s.size;
  h.cols = s.size;
  h.values = s.values;
  return h;
}

}  // namespace msa
