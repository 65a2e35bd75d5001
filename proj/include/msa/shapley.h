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

#ifndef MSA_SHAPLEY_H_
#define MSA_SHAPLEY_H_

// Shapley values and Shapley Modes (element-wise Shapley values of a
// tensor-valued game).
//
// Two estimators are provided:
//
//  * ShapleyExact enumerates all 2^n coalitions once and applies the
//    combinatorial weights |S|! (n-|S|-1)! / n!, which is the same average
//    as running every one of the n! orderings.
//  * ShapleySampled draws p orderings uniformly with replacement. Each
//    ordering is swept once: the n+1 nested coalitions (empty, then adding
//    players in order) are evaluated and every player receives the
//    difference between consecutive values. Those marginals telescope to
//    V(N) - V(empty) within every single permutation.
//
// Sampled results are a deterministic function of (game, seed, p). The k-th
// permutation is drawn from its own sub-stream (see rng.h) and per-permutation
// marginals are folded into the running mean in ascending k, so the worker
// count never changes a bit of the output.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msa/game.h"

namespace msa {

inline constexpr std::size_t kDefaultExactCap = 12;
// Enumerating 2^n coalitions beyond this is never reasonable.
inline constexpr std::size_t kMaxExactCap = 30;

// An ordering of players 0..n-1.
class Permutation {
 public:
  explicit Permutation(std::vector<std::size_t> order);

  // Permutation number `index` of the stream seeded by `seed`.
  static Permutation Sample(std::size_t n, std::uint64_t seed,
                            std::uint64_t index);

  const std::vector<std::size_t>& order() const { return order_; }
  std::size_t size() const { return order_.size(); }
  std::size_t operator[](std::size_t pos) const { return order_[pos]; }

 private:
  std::vector<std::size_t> order_;
};

enum class SamplingMode {
  kAuto,        // exact when n <= exact_cap, Monte Carlo otherwise
  kExact,       // exact; CapExceeded when n > exact_cap
  kMonteCarlo,  // always sampled
};

struct SamplingPlan {
  SamplingMode mode = SamplingMode::kAuto;
  std::uint64_t n_permutations = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::size_t exact_cap = kDefaultExactCap;  // at most kMaxExactCap
  // Entries of the opt-in LRU cache of coalition values; 0 disables it.
  std::size_t cache_capacity = 0;
};

struct ShapleyResult {
  std::vector<std::string> player_labels;
  std::vector<std::string> element_labels;
  Shape shape;
  std::vector<ValueTensor> modes;  // one per player, each of `shape`
  // Sample standard deviation of the per-permutation marginals over sqrt(p).
  // Absent for exact results.
  std::optional<std::vector<ValueTensor>> standard_error;
  bool exact = false;
  // Orderings averaged over; n! for exact results.
  std::uint64_t n_permutations_used = 0;
  std::uint64_t seed = 0;
  double elapsed_s = 0.0;
  ValueTensor empty_value;  // V(empty)
  ValueTensor grand_value;  // V(N)
  std::uint64_t evaluations = 0;
  std::uint64_t cache_hits = 0;
};

// V(S + {player}) - V(S). Throws InvalidArgument when player is already in S.
ValueTensor MarginalContribution(const Game& game, const Coalition& coalition,
                                 std::size_t player);

// Exact Shapley Modes. Uses plan.exact_cap and plan.workers only.
ShapleyResult ShapleyExact(const Game& game, const SamplingPlan& plan = {});

// Monte Carlo Shapley Modes over plan.n_permutations sampled orderings.
ShapleyResult ShapleySampled(const Game& game, const SamplingPlan& plan);

// Dispatch on plan.mode and the player count.
ShapleyResult ShapleyAuto(const Game& game, const SamplingPlan& plan);

struct TracePoint {
  std::uint64_t n_permutations = 0;
  std::vector<ValueTensor> modes;
  std::vector<ValueTensor> standard_error;
};

// Running estimates of the sampled estimator at each checkpoint. All points
// come from one permutation stream, so point k is exactly the estimate
// ShapleySampled would return with p = checkpoints[k].
std::vector<TracePoint> ConvergenceTrace(
    const Game& game, const SamplingPlan& plan,
    std::span<const std::uint64_t> checkpoints);

}  // namespace msa

#endif  // MSA_SHAPLEY_H_
