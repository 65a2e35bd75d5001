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

#include "msa/analysis.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "csv_util.h"
#include "msa/errors.h"
#include "msa/stats.h"

namespace msa {

std::vector<double> ContributionMatrix::column(std::size_t function) const {
  std::vector<double> col(players);
  for (std::size_t i = 0; i < players; ++i) col[i] = at(i, function);
  return col;
}

void ContributionMatrix::Validate() const {
  if (values.size() != players * functions) {
    throw ShapeMismatch("contribution matrix storage does not match " +
                        std::to_string(players) + " x " +
                        std::to_string(functions));
  }
  if (player_labels.size() != players || function_labels.size() != functions) {
    throw ShapeMismatch("contribution matrix labels do not match its shape");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw NonFiniteValue("non-finite contribution");
  }
}

ContributionMatrix ContributionMatrix::FromShapleyResult(const ShapleyResult& r) {
  ContributionMatrix m;
  m.players = r.modes.size();
  m.functions = NumElements(r.shape);
  m.player_labels = r.player_labels;
  m.function_labels = r.element_labels;
  m.values.reserve(m.players * m.functions);
  for (const ValueTensor& mode : r.modes) {
    m.values.insert(m.values.end(), mode.data.begin(), mode.data.end());
  }
  m.Validate();
  return m;
}

ContributionMatrix ParseContributionMatrix(std::string_view csv_text,
                                           const std::string& source) {
  const auto rows = internal::SplitCsv(csv_text);
  if (rows.empty()) throw ParseError(source, 0, "empty contribution matrix");
  const auto& header = rows[0].fields;
  if (header.size() < 2 || header[0] != "player") {
    throw ParseError(source, rows[0].line,
                     "header must be 'player,<function_0>,...'");
  }
  ContributionMatrix m;
  m.functions = header.size() - 1;
  m.function_labels.assign(header.begin() + 1, header.end());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != m.functions + 1) {
      throw ParseError(source, row.line,
                       "expected " + std::to_string(m.functions + 1) +
                           " fields, got " + std::to_string(row.fields.size()));
    }
    m.player_labels.push_back(row.fields[0]);
    for (std::size_t f = 0; f < m.functions; ++f) {
      double v;
      if (!internal::ParseDouble(row.fields[f + 1], &v)) {
        throw ParseError(source, row.line,
                         "invalid number '" + row.fields[f + 1] + "'");
      }
      if (!std::isfinite(v)) {
        throw NonFiniteValue(source + ":" + std::to_string(row.line) +
                             ": non-finite contribution");
      }
      m.values.push_back(v);
    }
  }
  m.players = m.player_labels.size();
  return m;
}

ContributionMatrix LoadContributionMatrix(const std::filesystem::path& path) {
  return ParseContributionMatrix(internal::ReadFile(path), path.string());
}

std::string ContributionMatrixToCsv(const ContributionMatrix& m) {
  m.Validate();
  std::ostringstream out;
  out << "player";
  for (const auto& f : m.function_labels) out << "," << f;
  out << "\n";
  for (std::size_t i = 0; i < m.players; ++i) {
    out << m.player_labels[i];
    for (std::size_t f = 0; f < m.functions; ++f) {
      out << "," << internal::FormatDouble(m.at(i, f));
    }
    out << "\n";
  }
  return out.str();
}

// --- IDC ---------------------------------------------------------------------

namespace {

struct Entropy {
  double h = 0.0;
  double h_max = 0.0;
};

Entropy SquaredContributionEntropy(std::span<const double> c) {
  const std::size_t n = c.size();
  if (n < 2) throw InvalidArgument("IDC needs at least 2 contributions");
  double total = 0.0;
  for (double x : c) {
    if (!std::isfinite(x)) throw NonFiniteValue("non-finite contribution");
    total += x * x;
  }
  if (total == 0.0) {
    throw InvalidArgument("IDC undefined: all contributions are zero");
  }
  double h = 0.0;
  for (double x : c) {
    const double p = x * x / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return {h, std::log(static_cast<double>(n))};
}

}  // namespace

double Idc(std::span<const double> contributions) {
  const Entropy e = SquaredContributionEntropy(contributions);
  return std::clamp(e.h / e.h_max, 0.0, 1.0);
}

IdcReport ComputeIdc(const ContributionMatrix& contributions) {
  contributions.Validate();
  IdcReport report;
  report.function_labels = contributions.function_labels;
  for (std::size_t f = 0; f < contributions.functions; ++f) {
    const std::vector<double> col = contributions.column(f);
    Entropy e;
    try {
      e = SquaredContributionEntropy(col);
    } catch (const InvalidArgument& err) {
      throw InvalidArgument("function '" + contributions.function_labels[f] +
                            "': " + err.what());
    }
    report.entropy.push_back(e.h);
    report.per_function.push_back(std::clamp(e.h / e.h_max, 0.0, 1.0));
    report.h_max = e.h_max;
  }
  return report;
}

// --- Similarity --------------------------------------------------------------

SimilarityMatrix InterclassSimilarity(const ContributionMatrix& contributions) {
  contributions.Validate();
  if (contributions.players < 2) {
    throw InvalidArgument("inter-class similarity needs at least 2 players");
  }
  const std::size_t f = contributions.functions;
  std::vector<std::vector<double>> cols(f);
  for (std::size_t a = 0; a < f; ++a) cols[a] = contributions.column(a);

  SimilarityMatrix s;
  s.labels = contributions.function_labels;
  s.size = f;
  s.values.assign(f * f, 0.0);
  s.zero_variance.assign(f, false);
  for (std::size_t a = 0; a < f; ++a) {
    s.values[a * f + a] = 1.0;
    for (std::size_t b = a + 1; b < f; ++b) {
      const Correlation c = Pearson(cols[a], cols[b]);
      s.values[a * f + b] = s.values[b * f + a] = c.r;
    }
    // Flag per column, independent of which partner exposed it.
    const double first = cols[a].front();
    s.zero_variance[a] = std::all_of(cols[a].begin(), cols[a].end(),
                                     [&](double v) { return v == first; });
  }
  return s;
}

// --- Lesion sweeps -----------------------------------------------------------

std::vector<std::size_t> RankPlayers(const ShapleyResult& result,
                                     std::size_t element, LesionOrder order) {
  const std::size_t k = NumElements(result.shape);
  if (element >= k) {
    throw InvalidArgument("element " + std::to_string(element) +
                          " out of range for output of " + std::to_string(k));
  }
  std::vector<std::size_t> rank(result.modes.size());
  std::iota(rank.begin(), rank.end(), 0);
  auto value = [&](std::size_t i) { return result.modes[i].data[element]; };
  std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
    return order == LesionOrder::kTopFirst ? value(a) > value(b)
                                           : value(a) < value(b);
  });
  return rank;
}

std::vector<SweepPoint> LesionSweep(const Game& game,
                                    const ShapleyResult& result,
                                    std::size_t element, LesionOrder order,
                                    std::span<const std::size_t> ks) {
  const std::size_t n = game.num_players();
  if (result.modes.size() != n) {
    throw ShapeMismatch("result has " + std::to_string(result.modes.size()) +
                        " players, game has " + std::to_string(n));
  }
  if (ks.empty()) throw InvalidArgument("empty list of lesion sizes");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] >= n) {
      throw InvalidArgument("lesion size " + std::to_string(ks[i]) +
                            " must be below the player count " +
                            std::to_string(n));
    }
    if (i > 0 && ks[i] <= ks[i - 1]) {
      throw InvalidArgument("lesion sizes must be strictly ascending");
    }
  }
  const std::vector<std::size_t> rank = RankPlayers(result, element, order);
  std::vector<SweepPoint> points;
  for (std::size_t k : ks) {
    Coalition c = Coalition::Grand(n);
    SweepPoint pt;
    pt.k = k;
    pt.lesioned.assign(rank.begin(), rank.begin() + static_cast<std::ptrdiff_t>(k));
    for (std::size_t p : pt.lesioned) c.Remove(p);
    pt.value = game.Evaluate(c);
    points.push_back(std::move(pt));
  }
  return points;
}

// --- Strings -----------------------------------------------------------------

std::u32string DecodeUtf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if (b0 < 0x80) {
      len = 1, cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4, cp = b0 & 0x07, min = 0x10000;
    }
    bool ok = len > 0 && i + len <= text.size();
    for (std::size_t j = 1; ok && j < len; ++j) {
      const auto b = static_cast<unsigned char>(text[i + j]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    ok = ok && cp >= min && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
    if (ok) {
      out.push_back(cp);
      i += len;
    } else {
      out.push_back(0xDC00 + b0);
      ++i;
    }
  }
  return out;
}

std::size_t Levenshtein(std::string_view a, std::string_view b) {
  const std::u32string s = DecodeUtf8(a);
  const std::u32string t = DecodeUtf8(b);
  if (s.empty()) return t.size();
  if (t.empty()) return s.size();
  // Two rows over the shorter string.
  const std::u32string& rows = s.size() >= t.size() ? s : t;
  const std::u32string& cols = s.size() >= t.size() ? t : s;
  std::vector<std::size_t> prev(cols.size() + 1), cur(cols.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= rows.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= cols.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (rows[i - 1] == cols[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[cols.size()];
}

double DigitOverlapScore(std::string_view prediction, std::string_view truth) {
  if (truth.empty()) throw InvalidArgument("ground-truth answer is empty");
  const std::size_t len = std::max(DecodeUtf8(prediction).size(),
                                   DecodeUtf8(truth).size());
  const double d = static_cast<double>(Levenshtein(prediction, truth));
  return std::clamp(1.0 - d / static_cast<double>(len), 0.0, 1.0);
}

}  // namespace msa
