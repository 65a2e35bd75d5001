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

#ifndef MSA_CLUSTERING_H_
#define MSA_CLUSTERING_H_

// Grouping players by the shape of their contributions: |Pearson| between
// flattened Shapley Modes gives a weighted graph, Louvain splits it into
// communities, and whole communities can then be lesioned together.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msa/game.h"

namespace msa {

// Dense symmetric weights in [0, 1] with a zero diagonal.
struct SimilarityGraph {
  std::size_t n = 0;
  std::vector<double> weights;      // row-major n x n
  std::vector<bool> zero_variance;  // per node; such nodes have no edges

  double at(std::size_t i, std::size_t j) const { return weights[i * n + j]; }

  // Throws InvalidArgument when symmetry, range or the zero diagonal fail.
  void Validate() const;
};

// Edge weight (i, j) = |pearson(flat_i, flat_j)| over the row-major
// flattening of each tensor. Weights strictly below `threshold` are zeroed.
SimilarityGraph BuildSimilarityGraph(std::span<const ValueTensor> modes,
                                     double threshold = 0.0,
                                     unsigned workers = 1);

// Wraps an explicit weight matrix (validated).
SimilarityGraph GraphFromWeights(std::size_t n, std::vector<double> weights);

struct CommunityAssignment {
  std::vector<std::size_t> labels;  // contiguous ids from 0
  double modularity = 0.0;
  std::uint64_t seed = 0;
  double resolution = 1.0;

  std::size_t num_communities() const;
  std::vector<std::size_t> Members(std::size_t community) const;
};

// Newman-Girvan modularity with resolution gamma:
//   Q = sum_c [ in_c / 2m - gamma (tot_c / 2m)^2 ].
double Modularity(const SimilarityGraph& graph,
                  std::span<const std::size_t> labels,
                  double resolution = 1.0);

// Two-phase Louvain (local moving, then aggregation, until no node moves).
// Node visit order is reshuffled from `seed` on every pass; on equal gain a
// node stays in its current community. The returned partition is never
// worse than putting every node in one community. Deterministic given
// (graph, seed, resolution). Throws InvalidArgument when the graph has no
// positive edge or resolution <= 0.
CommunityAssignment Louvain(const SimilarityGraph& graph, std::uint64_t seed,
                            double resolution = 1.0);

// Evaluates the game with every listed player lesioned.
ValueTensor LesionPlayers(const Game& game, std::span<const std::size_t> players);

// Evaluates the game with all members of `community` lesioned.
ValueTensor ClusterLesion(const Game& game,
                          const CommunityAssignment& assignment,
                          std::size_t community);

// Edge list CSV `i,j,weight` (i < j, positive weights only). ParseEdgeList
// infers the node count from the largest endpoint when n is 0.
std::string EdgeListCsv(const SimilarityGraph& graph);
SimilarityGraph ParseEdgeList(std::string_view csv_text, std::size_t n,
                              const std::string& source = "<memory>");

// {labels:[...], modularity: Q, seed, resolution}
std::string AssignmentToJson(const CommunityAssignment& assignment);
CommunityAssignment AssignmentFromJson(std::string_view json_text,
                                       const std::string& source = "<memory>");

}  // namespace msa

#endif  // MSA_CLUSTERING_H_
