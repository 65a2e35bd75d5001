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

#ifndef MSA_RESULT_IO_H_
#define MSA_RESULT_IO_H_

// Serialization of results and derived reports.
//
// result.json:
//   {players:[labels], elements:[labels], shape:[...], modes:[[...]],
//    stderr:[[...]] | null, v_empty:[...], v_grand:[...], seed, p,
//    exact, evaluations, elapsed_s}
// Every tensor is a flat row-major array. elapsed_s is the only field that
// varies between identical runs.

#include <filesystem>
#include <string>
#include <string_view>

#include "msa/analysis.h"
#include "msa/shapley.h"

namespace msa {

std::string ResultToJson(const ShapleyResult& result);
ShapleyResult ResultFromJson(std::string_view json_text,
                             const std::string& source = "<memory>");
ShapleyResult LoadResult(const std::filesystem::path& path);

// players x flattened elements; same layout as a ContributionMatrix CSV.
std::string ModesToCsv(const ShapleyResult& result);

std::string IdcReportToCsv(const IdcReport& report);
std::string IdcReportToJson(const IdcReport& report);

std::string SimilarityToCsv(const SimilarityMatrix& s);
std::string SimilarityToJson(const SimilarityMatrix& s);
SimilarityMatrix SimilarityFromCsv(std::string_view csv_text,
                                   const std::string& source = "<memory>");

}  // namespace msa

#endif  // MSA_RESULT_IO_H_
