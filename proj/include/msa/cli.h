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

#ifndef MSA_CLI_H_
#define MSA_CLI_H_

// The `msa` command line. Subcommands:
//
//   attribute          Shapley Modes of a game  -> result.json, modes.csv
//   idc                distributed-computation index per function
//   similarity         inter-function Pearson similarity
//   cluster            |Pearson| graph + Louvain communities (+ lesions)
//   lesion-sweep       re-evaluate with top/bottom-k contributors lesioned
//   weight-importance  mean |weight| vs Shapley value per hidden neuron
//   report             SVG heatmaps of contributions and similarity
//
// Every command writes manifest.json next to its outputs. Exit codes:
// 0 success, 2 usage or configuration error, 3 game-evaluation failure.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "msa/game.h"

namespace msa::cli {

inline constexpr char kToolVersion[] = "1.0.0";

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitEvaluation = 3 };

struct RunConfig {
  std::string command;
  // Game source: builtin spec (glove[:L/R], additive[:w,..],
  // majority[:n:quota]), "tabular" with table, or "mlp" with weights+dataset.
  std::string game;
  std::string table;
  std::string weights;
  std::string dataset;
  // Analysis inputs.
  std::string input;       // contribution-matrix CSV
  std::string result;      // result.json
  std::string graph;       // edge-list CSV
  std::string similarity;  // similarity CSV
  // Sampling plan.
  std::uint64_t permutations = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  bool exact = false;
  bool monte_carlo = false;
  std::size_t exact_cap = 12;
  std::size_t cache = 0;
  // Analysis parameters.
  std::optional<std::size_t> element;
  std::vector<std::size_t> ks = {0};
  std::string order = "top";
  double resolution = 1.0;
  double threshold = 0.0;
  bool lesion = false;
  // Output.
  std::string out = "msa_out";
  std::vector<std::string> formats;
};

// Builds the game named by the config's game-source fields. Throws
// InvalidArgument (or a loader error) when the source is incomplete.
std::unique_ptr<Game> BuildGame(const RunConfig& config);

// Parses and runs one command line. args[0] is the program name.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// Hex SHA-256 of a file's bytes.
std::string FileSha256(const std::string& path);

}  // namespace msa::cli

#endif  // MSA_CLI_H_
