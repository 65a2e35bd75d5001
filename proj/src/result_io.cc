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

#include "msa/result_io.h"

#include <cmath>
#include <sstream>

#include "csv_util.h"
#include "json.hpp"
#include "msa/errors.h"

namespace msa {
namespace {

using json = nlohmann::json;

json TensorsToJson(const std::vector<ValueTensor>& ts) {
  json arr = json::array();
  for (const auto& t : ts) arr.push_back(t.data);
  return arr;
}

std::vector<ValueTensor> TensorsFromJson(const json& j, const Shape& shape) {
  std::vector<ValueTensor> out;
  for (const auto& row : j) {
    out.emplace_back(shape, row.get<std::vector<double>>());
    if (!out.back().AllFinite()) throw NonFiniteValue("non-finite value in result");
  }
  return out;
}

}  // namespace

std::string ResultToJson(const ShapleyResult& r) {
  json j;
  j["players"] = r.player_labels;
  j["elements"] = r.element_labels;
  j["shape"] = r.shape;
  j["modes"] = TensorsToJson(r.modes);
  j["stderr"] = r.standard_error ? TensorsToJson(*r.standard_error) : json(nullptr);
  j["v_empty"] = r.empty_value.data;
  j["v_grand"] = r.grand_value.data;
  j["seed"] = r.seed;
  j["p"] = r.n_permutations_used;
  j["exact"] = r.exact;
  j["evaluations"] = r.evaluations;
  j["elapsed_s"] = r.elapsed_s;
  return j.dump(2) + "\n";
}

ShapleyResult ResultFromJson(std::string_view json_text, const std::string& source) {
  try {
    const json j = json::parse(json_text);
    ShapleyResult r;
    r.shape = j.at("shape").get<Shape>();
    r.player_labels = j.at("players").get<std::vector<std::string>>();
    r.modes = TensorsFromJson(j.at("modes"), r.shape);
    if (r.modes.size() != r.player_labels.size()) {
      throw ShapeMismatch("modes and players differ in count");
    }
    if (j.contains("elements")) {
      r.element_labels = j["elements"].get<std::vector<std::string>>();
    } else {
      for (std::size_t e = 0; e < NumElements(r.shape); ++e) {
        r.element_labels.push_back("e" + std::to_string(e));
      }
    }
    if (j.contains("stderr") && !j["stderr"].is_null()) {
      r.standard_error = TensorsFromJson(j["stderr"], r.shape);
    }
    r.empty_value = ValueTensor(r.shape, j.at("v_empty").get<std::vector<double>>());
    r.grand_value = ValueTensor(r.shape, j.at("v_grand").get<std::vector<double>>());
    r.seed = j.value("seed", std::uint64_t{0});
    r.n_permutations_used = j.value("p", std::uint64_t{0});
    r.exact = j.value("exact", false);
    r.evaluations = j.value("evaluations", std::uint64_t{0});
    r.elapsed_s = j.value("elapsed_s", 0.0);
    return r;
  } catch (const json::exception& e) {
    throw ParseError(source, 0, e.what());
  } catch (const ShapeMismatch& e) {
    throw ParseError(source, 0, e.what());
  }
}

ShapleyResult LoadResult(const std::filesystem::path& path) {
  return ResultFromJson(internal::ReadFile(path), path.string());
}

std::string ModesToCsv(const ShapleyResult& result) {
  return ContributionMatrixToCsv(ContributionMatrix::FromShapleyResult(result));
}

std::string IdcReportToCsv(const IdcReport& report) {
  std::ostringstream out;
  out << "function,idc,entropy,h_max\n";
  for (std::size_t f = 0; f < report.per_function.size(); ++f) {
    out << report.function_labels[f] << ","
        << internal::FormatDouble(report.per_function[f]) << ","
        << internal::FormatDouble(report.entropy[f]) << ","
        << internal::FormatDouble(report.h_max) << "\n";
  }
  return out.str();
}

std::string IdcReportToJson(const IdcReport& report) {
  json j;
  j["functions"] = report.function_labels;
  j["idc"] = report.per_function;
  j["entropy"] = report.entropy;
  j["h_max"] = report.h_max;
  return j.dump(2) + "\n";
}

std::string SimilarityToCsv(const SimilarityMatrix& s) {
  std::ostringstream out;
  out << "function";
  for (const auto& l : s.labels) out << "," << l;
  out << "\n";
  for (std::size_t a = 0; a < s.size; ++a) {
    out << s.labels[a];
    for (std::size_t b = 0; b < s.size; ++b) {
      out << "," << internal::FormatDouble(s.at(a, b));
    }
    out << "\n";
  }
  return out.str();
}

std::string SimilarityToJson(const SimilarityMatrix& s) {
  json j;
  j["labels"] = s.labels;
  json rows = json::array();
  for (std::size_t a = 0; a < s.size; ++a) {
    rows.push_back(std::vector<double>(s.values.begin() + static_cast<std::ptrdiff_t>(a * s.size),
                                       s.values.begin() + static_cast<std::ptrdiff_t>((a + 1) * s.size)));
  }
  j["matrix"] = rows;
  std::vector<bool> flags(s.zero_variance.begin(), s.zero_variance.end());
  j["zero_variance"] = flags;
  return j.dump(2) + "\n";
}

SimilarityMatrix SimilarityFromCsv(std::string_view csv_text, const std::string& source) {
  const auto rows = internal::SplitCsv(csv_text);
  if (rows.empty() || rows[0].fields.size() < 2 || rows[0].fields[0] != "function") {
    throw ParseError(source, rows.empty() ? 0 : rows[0].line,
                     "header must be 'function,<label_0>,...'");
  }
  SimilarityMatrix s;
  s.labels.assign(rows[0].fields.begin() + 1, rows[0].fields.end());
  s.size = s.labels.size();
  if (rows.size() != s.size + 1) {
    throw ParseError(source, 0, "similarity matrix must be square");
  }
  for (std::size_t a = 0; a < s.size; ++a) {
    const auto& row = rows[a + 1];
    if (row.fields.size() != s.size + 1) {
      throw ParseError(source, row.line, "row length does not match header");
    }
    for (std::size_t b = 0; b < s.size; ++b) {
      double v;
      if (!internal::ParseDouble(row.fields[b + 1], &v) || !std::isfinite(v)) {
        throw ParseError(source, row.line, "invalid number '" + row.fields[b + 1] + "'");
      }
      s.values.push_back(v);
    }
  }
  s.zero_variance.assign(s.size, false);
  return s;
}

}  // namespace msa
