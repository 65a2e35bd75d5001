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

#ifndef MSA_REPORT_H_
#define MSA_REPORT_H_

// Standalone SVG heatmaps. The colour scale is diverging and symmetric
// around 0: +max|v| is full red, -max|v| full blue, 0 white. Every cell is a
// <rect> carrying data-row, data-col and data-value, so tests can read the
// numbers back without looking at pixels.

#include <cstddef>
#include <string>
#include <vector>

#include "msa/analysis.h"

namespace msa {

struct Heatmap {
  std::string title;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major
};

// "#rrggbb" for v on the symmetric scale [-max_abs, max_abs].
std::string DivergingColor(double v, double max_abs);

// Throws InvalidArgument for an empty or inconsistent matrix.
std::string RenderHeatmapSvg(const Heatmap& heatmap);

Heatmap ContributionHeatmap(const ContributionMatrix& m);
Heatmap SimilarityHeatmap(const SimilarityMatrix& s);

}  // namespace msa

#endif  // MSA_REPORT_H_
