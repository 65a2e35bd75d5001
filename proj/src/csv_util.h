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

#ifndef MSA_SRC_CSV_UTIL_H_
#define MSA_SRC_CSV_UTIL_H_

// Minimal CSV helpers shared by the file loaders. Fields are unquoted; the
// formats this library reads never contain commas inside a field.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace msa::internal {

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

struct CsvRow {
  std::size_t line = 0;  // 1-based line number in the source
  std::vector<std::string> fields;
};

// Splits into rows, dropping blank lines and trailing '\r'.
std::vector<CsvRow> SplitCsv(std::string_view text);

// Strict decimal parse of the whole field. Accepts "nan"/"inf" so callers can
// report them as non-finite rather than as syntax errors.
bool ParseDouble(std::string_view field, double* out);
bool ParseSize(std::string_view field, std::size_t* out);

// Round-trip representation (%.17g).
std::string FormatDouble(double v);

}  // namespace msa::internal

#endif  // MSA_SRC_CSV_UTIL_H_
