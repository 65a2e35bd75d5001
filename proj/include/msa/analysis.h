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

#ifndef MSA_ANALYSIS_H_
#define MSA_ANALYSIS_H_

// Metrics computed on top of contribution vectors and matrices.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msa/game.h"
#include "msa/shapley.h"

namespace msa {

// Contributions c[player][function], row-major.
struct ContributionMatrix {
  std::size_t players = 0;
  std::size_t functions = 0;
  std::vector<double> values;
  std::vector<std::string> player_labels;
  std::vector<std::string> function_labels;

  double at(std::size_t player, std::size_t function) const {
    return values[player * functions + function];
  }
  std::vector<double> column(std::size_t function) const;

  // Throws ShapeMismatch / NonFiniteValue.
  void Validate() const;

  // One row per player, one column per flattened output element.
  static ContributionMatrix FromShapleyResult(const ShapleyResult& result);
};

// CSV with header `player,<function_0>,...`.
ContributionMatrix LoadContributionMatrix(const std::filesystem::path& path);
ContributionMatrix ParseContributionMatrix(std::string_view csv_text,
                                           const std::string& source = "<memory>");
std::string ContributionMatrixToCsv(const ContributionMatrix& m);

// Index of Distributed Computation of one contribution vector: the entropy
// of p_i = c_i^2 / sum_j c_j^2, normalised by ln(n). 1 means the function is
// spread evenly over all players, 0 means a single player carries it.
// Natural log is used; the ratio does not depend on the base.
//
// Throws InvalidArgument for n < 2 or an all-zero vector.
double Idc(std::span<const double> contributions);

struct IdcReport {
  std::vector<std::string> function_labels;
  std::vector<double> per_function;  // M in [0, 1]
  std::vector<double> entropy;       // raw H (nats)
  double h_max = 0.0;                // ln(players)
};

IdcReport ComputeIdc(const ContributionMatrix& contributions);

// Symmetric [functions x functions] Pearson correlation of the columns.
struct SimilarityMatrix {
  std::vector<std::string> labels;
  std::size_t size = 0;
  std::vector<double> values;       // row-major
  std::vector<bool> zero_variance;  // per function

  double at(std::size_t a, std::size_t b) const { return values[a * size + b]; }
};

// Diagonal is 1; a zero-variance column correlates 0 with every other one
// and is flagged. Throws InvalidArgument for fewer than 2 players.
SimilarityMatrix InterclassSimilarity(const ContributionMatrix& contributions);

enum class LesionOrder { kTopFirst, kBottomFirst };

// Players ranked by their contribution to `element`: descending for
// kTopFirst, ascending for kBottomFirst. Ties keep ascending player index.
std::vector<std::size_t> RankPlayers(const ShapleyResult& result,
                                     std::size_t element, LesionOrder order);

struct SweepPoint {
  std::size_t k = 0;
  std::vector<std::size_t> lesioned;
  ValueTensor value;
};

// Re-evaluates the game with the first k ranked players lesioned, for each
// k in ks (ascending, every k < n). k = 0 is the grand coalition.
std::vector<SweepPoint> LesionSweep(const Game& game,
                                    const ShapleyResult& result,
                                    std::size_t element, LesionOrder order,
                                    std::span<const std::size_t> ks);

// Edit distance with unit insert/delete/substitute costs, counted over
// Unicode scalar values of UTF-8 input. Malformed bytes count as one symbol
// each and never compare equal to a valid character.
std::size_t Levenshtein(std::string_view a, std::string_view b);

// Decodes UTF-8 into scalar values; malformed bytes map to U+DC80..U+DCFF.
std::u32string DecodeUtf8(std::string_view text);

// 1 - Levenshtein(prediction, truth) / max(len(prediction), len(truth)),
// clamped to [0, 1]. Throws InvalidArgument when truth is empty.
double DigitOverlapScore(std::string_view prediction, std::string_view truth);

}  // namespace msa

#endif  // MSA_ANALYSIS_H_
