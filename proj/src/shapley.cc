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

#include "msa/shapley.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <list>
#include <memory>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "msa/errors.h"
#include "msa/rng.h"

namespace msa {
namespace {

using Clock = std::chrono::steady_clock;

// Upper bound on the per-block marginal buffer.
constexpr std::size_t kBlockBudgetBytes = std::size_t{256} << 20;
constexpr std::size_t kMaxBlockPermutations = 1024;

// Thread-safe LRU map Coalition -> ValueTensor.
class CoalitionCache {
 public:
  explicit CoalitionCache(std::size_t capacity) : capacity_(capacity) {}

  std::optional<ValueTensor> Find(const Coalition& c) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = index_.find(c);
    if (it == index_.end()) return std::nullopt;
    entries_.splice(entries_.begin(), entries_, it->second);
    ++hits_;
    return it->second->second;
  }

  void Insert(const Coalition& c, const ValueTensor& v) {
    std::lock_guard<std::mutex> lock(mu_);
    if (index_.contains(c)) return;
    entries_.emplace_front(c, v);
    index_.emplace(c, entries_.begin());
    if (entries_.size() > capacity_) {
      index_.erase(entries_.back().first);
      entries_.pop_back();
    }
  }

  std::uint64_t hits() const {
    std::lock_guard<std::mutex> lock(mu_);
    return hits_;
  }

 private:
  using Entry = std::pair<Coalition, ValueTensor>;
  mutable std::mutex mu_;
  std::size_t capacity_;
  std::list<Entry> entries_;
  std::unordered_map<Coalition, std::list<Entry>::iterator, CoalitionHash>
      index_;
  std::uint64_t hits_ = 0;
};

// One evaluation context per worker: the game (shared or cloned) plus the
// optional shared cache.
class Evaluator {
 public:
  Evaluator(const Game& game, CoalitionCache* cache)
      : game_(&game), cache_(cache) {}
  Evaluator(std::unique_ptr<Game> owned, CoalitionCache* cache)
      : owned_(std::move(owned)), game_(owned_.get()), cache_(cache) {}

  ValueTensor operator()(const Coalition& c) const {
    if (cache_ != nullptr) {
      if (auto hit = cache_->Find(c)) return *std::move(hit);
    }
    ValueTensor v;
    try {
      v = game_->Evaluate(c);
    } catch (const std::exception& e) {
      throw EvaluationError(c.ToBitstring(), e.what());
    }
    if (cache_ != nullptr) cache_->Insert(c, v);
    return v;
  }

 private:
  std::unique_ptr<Game> owned_;
  const Game* game_;
  CoalitionCache* cache_;
};

std::vector<Evaluator> MakeEvaluators(const Game& game, unsigned workers,
                                      CoalitionCache* cache) {
  std::vector<Evaluator> out;
  out.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    if (game.clone_per_worker()) {
      out.emplace_back(game.Clone(), cache);
    } else {
      out.emplace_back(game, cache);
    }
  }
  return out;
}

// Runs body(worker, index) for index in [0, count) on `workers` threads.
// Indices are claimed dynamically; the first failure (by index) is rethrown.
template <typename Body>
void ParallelFor(unsigned workers, std::size_t count, Body&& body) {
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](unsigned worker, std::atomic<std::size_t>& next) {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        body(worker, i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::atomic<std::size_t> next{0};
  const unsigned used =
      static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (used <= 1) {
    run(0, next);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(used);
    for (unsigned w = 0; w < used; ++w) {
      threads.emplace_back([&, w] { run(w, next); });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void ValidateWorkers(const SamplingPlan& plan) {
  if (plan.workers == 0) throw InvalidArgument("workers must be positive");
}

void ValidateCap(const SamplingPlan& plan) {
  if (plan.exact_cap > kMaxExactCap) {
    throw InvalidArgument("exact cap " + std::to_string(plan.exact_cap) +
                          " exceeds the hard maximum " + std::to_string(kMaxExactCap));
  }
}

ShapleyResult MakeResultSkeleton(const Game& game, const GameSpec& spec) {
  ShapleyResult r;
  r.player_labels = game.player_labels();
  r.element_labels = game.element_labels();
  r.shape = spec.output_shape;
  return r;
}

// Running per-element mean and sum of squared deviations (Welford), folded
// strictly in permutation order.
struct MarginalAccumulator {
  std::size_t n_players;
  std::size_t n_elements;
  std::uint64_t count = 0;
  std::vector<double> mean;
  std::vector<double> m2;

  MarginalAccumulator(std::size_t n, std::size_t k)
      : n_players(n), n_elements(k), mean(n * k, 0.0), m2(n * k, 0.0) {}

  // `marginals` is player-major: [player][element].
  void Add(std::span<const double> marginals) {
    ++count;
    const double inv = 1.0 / static_cast<double>(count);
    for (std::size_t j = 0; j < mean.size(); ++j) {
      const double x = marginals[j];
      const double delta = x - mean[j];
      mean[j] += delta * inv;
      m2[j] += delta * (x - mean[j]);
    }
  }

  TracePoint Snapshot(const Shape& shape) const {
    TracePoint t;
    t.n_permutations = count;
    t.modes.reserve(n_players);
    t.standard_error.reserve(n_players);
    for (std::size_t i = 0; i < n_players; ++i) {
      const auto first = mean.begin() + static_cast<std::ptrdiff_t>(i * n_elements);
      t.modes.emplace_back(
          shape, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(n_elements)));
      std::vector<double> se(n_elements, 0.0);
      if (count > 1) {
        const double c = static_cast<double>(count);
        for (std::size_t e = 0; e < n_elements; ++e) {
          se[e] = std::sqrt(m2[i * n_elements + e] / (c - 1.0)) / std::sqrt(c);
        }
      }
      t.standard_error.emplace_back(shape, std::move(se));
    }
    return t;
  }
};

struct SamplingRun {
  std::vector<TracePoint> points;
  ValueTensor empty_value;
  ValueTensor grand_value;
  std::uint64_t evaluations = 0;
  std::uint64_t cache_hits = 0;
};

// Core sampled estimator: sweeps permutations 0..max(checkpoints)-1 and
// snapshots the running estimate at every checkpoint.
SamplingRun RunSampling(const Game& game, const SamplingPlan& plan,
                        std::span<const std::uint64_t> checkpoints) {
  ValidateWorkers(plan);
  const GameSpec spec = game.spec();
  const std::size_t n = spec.n_players;
  const std::size_t k = NumElements(spec.output_shape);
  const std::uint64_t p = checkpoints.back();

  std::unique_ptr<CoalitionCache> cache;
  if (plan.cache_capacity > 0) {
    cache = std::make_unique<CoalitionCache>(plan.cache_capacity);
  }
  std::vector<Evaluator> evaluators =
      MakeEvaluators(game, plan.workers, cache.get());

  SamplingRun run;
  run.empty_value = evaluators[0](Coalition::Empty(n));
  run.grand_value = evaluators[0](Coalition::Grand(n));

  const std::size_t per_perm = n * k;
  const std::size_t block = static_cast<std::size_t>(std::clamp<std::uint64_t>(
      kBlockBudgetBytes / std::max<std::size_t>(1, per_perm * sizeof(double)),
      1, std::min<std::uint64_t>(p, kMaxBlockPermutations)));
  std::vector<double> buffer(block * per_perm);
  MarginalAccumulator acc(n, k);
  std::size_t next_checkpoint = 0;

  for (std::uint64_t start = 0; start < p; start += block) {
    const std::size_t count =
        static_cast<std::size_t>(std::min<std::uint64_t>(block, p - start));
    ParallelFor(plan.workers, count, [&](unsigned worker, std::size_t t) {
      const Evaluator& eval = evaluators[worker];
      const Permutation perm = Permutation::Sample(n, plan.seed, start + t);
      double* out = buffer.data() + t * per_perm;
      Coalition coalition = Coalition::Empty(n);
      ValueTensor prev = eval(coalition);
      for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t player = perm[pos];
        coalition.Add(player);
        ValueTensor cur = eval(coalition);
        double* dst = out + player * k;
        for (std::size_t e = 0; e < k; ++e) dst[e] = cur.data[e] - prev.data[e];
        prev = std::move(cur);
      }
    });
    for (std::size_t t = 0; t < count; ++t) {
      acc.Add(std::span<const double>(buffer.data() + t * per_perm, per_perm));
      while (next_checkpoint < checkpoints.size() &&
             checkpoints[next_checkpoint] == acc.count) {
        run.points.push_back(acc.Snapshot(spec.output_shape));
        ++next_checkpoint;
      }
    }
  }
  run.evaluations = 2 + p * (n + 1);
  run.cache_hits = cache ? cache->hits() : 0;
  return run;
}

// 1 / (n * C(n-1, s)) = s! (n-1-s)! / n!
std::vector<double> ShapleyWeights(std::size_t n) {
  std::vector<double> binom(n, 1.0);  // C(n-1, s)
  for (std::size_t s = 1; s < n; ++s) {
    binom[s] = binom[s - 1] * static_cast<double>(n - s) / static_cast<double>(s);
  }
  std::vector<double> w(n);
  for (std::size_t s = 0; s < n; ++s) {
    w[s] = 1.0 / (static_cast<double>(n) * std::round(binom[s]));
  }
  return w;
}

}  // namespace

Permutation::Permutation(std::vector<std::size_t> order)
    : order_(std::move(order)) {
  std::vector<bool> seen(order_.size(), false);
  for (std::size_t p : order_) {
    if (p >= order_.size() || seen[p]) {
      throw InvalidArgument("permutation is not a bijection on 0..n-1");
    }
    seen[p] = true;
  }
}

Permutation Permutation::Sample(std::size_t n, std::uint64_t seed,
                                std::uint64_t index) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  SplitMix64 rng(DeriveSeed(seed, index));
  Shuffle(std::span<std::size_t>(order), rng);
  Permutation perm({});
  perm.order_ = std::move(order);
  return perm;
}

ValueTensor MarginalContribution(const Game& game, const Coalition& coalition,
                                 std::size_t player) {
  if (coalition.width() != game.num_players()) {
    throw ShapeMismatch("coalition width does not match player count");
  }
  if (coalition.Contains(player)) {
    throw InvalidArgument("player " + std::to_string(player) +
                          " is already in the coalition");
  }
  Coalition with = coalition;
  with.Add(player);
  return Subtract(game.Evaluate(with), game.Evaluate(coalition));
}

ShapleyResult ShapleyExact(const Game& game, const SamplingPlan& plan) {
  ValidateWorkers(plan);
  ValidateCap(plan);
  const auto t0 = Clock::now();
  const GameSpec spec = game.spec();
  const std::size_t n = spec.n_players;
  const std::size_t cap = plan.exact_cap;
  if (n > cap) {
    throw CapExceeded("exact Shapley requested for " + std::to_string(n) +
                      " players; cap is " + std::to_string(cap));
  }
  const std::size_t k = NumElements(spec.output_shape);
  const std::size_t n_coalitions = std::size_t{1} << n;

  std::unique_ptr<CoalitionCache> cache;
  if (plan.cache_capacity > 0) {
    cache = std::make_unique<CoalitionCache>(plan.cache_capacity);
  }
  std::vector<Evaluator> evaluators =
      MakeEvaluators(game, plan.workers, cache.get());

  // values[mask] = V(mask); low bit of mask is player 0.
  std::vector<ValueTensor> values(n_coalitions);
  ParallelFor(plan.workers, n_coalitions, [&](unsigned worker, std::size_t m) {
    values[m] = evaluators[worker](Coalition::FromMask(n, m));
  });

  const std::vector<double> weights = ShapleyWeights(n);
  ShapleyResult r = MakeResultSkeleton(game, spec);
  r.modes.assign(n, ValueTensor::Zeros(spec.output_shape));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    std::vector<double>& acc = r.modes[i].data;
    for (std::size_t m = 0; m < n_coalitions; ++m) {
      if (m & bit) continue;
      const double w = weights[static_cast<std::size_t>(std::popcount(m))];
      const auto& with = values[m | bit].data;
      const auto& without = values[m].data;
      for (std::size_t e = 0; e < k; ++e) acc[e] += w * (with[e] - without[e]);
    }
  }

  std::uint64_t orderings = 1;
  for (std::size_t i = 2; i <= n; ++i) orderings *= i;
  r.exact = true;
  r.n_permutations_used = orderings;
  r.seed = plan.seed;
  r.empty_value = values.front();
  r.grand_value = values.back();
  r.evaluations = n_coalitions;
  r.cache_hits = cache ? cache->hits() : 0;
  r.elapsed_s = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

ShapleyResult ShapleySampled(const Game& game, const SamplingPlan& plan) {
  if (plan.n_permutations == 0) {
    throw InvalidArgument("number of permutations must be at least 1");
  }
  const auto t0 = Clock::now();
  const GameSpec spec = game.spec();
  const std::uint64_t checkpoint = plan.n_permutations;
  SamplingRun run = RunSampling(game, plan, std::span(&checkpoint, 1));

  ShapleyResult r = MakeResultSkeleton(game, spec);
  TracePoint& last = run.points.back();
  r.modes = std::move(last.modes);
  r.standard_error = std::move(last.standard_error);
  r.exact = false;
  r.n_permutations_used = plan.n_permutations;
  r.seed = plan.seed;
  r.empty_value = std::move(run.empty_value);
  r.grand_value = std::move(run.grand_value);
  r.evaluations = run.evaluations;
  r.cache_hits = run.cache_hits;
  r.elapsed_s = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

ShapleyResult ShapleyAuto(const Game& game, const SamplingPlan& plan) {
  switch (plan.mode) {
    case SamplingMode::kExact:
      return ShapleyExact(game, plan);
    case SamplingMode::kMonteCarlo:
      return ShapleySampled(game, plan);
    case SamplingMode::kAuto:
      break;
  }
  ValidateCap(plan);
  if (game.num_players() <= plan.exact_cap) {
    return ShapleyExact(game, plan);
  }
  return ShapleySampled(game, plan);
}

std::vector<TracePoint> ConvergenceTrace(
    const Game& game, const SamplingPlan& plan,
    std::span<const std::uint64_t> checkpoints) {
  if (checkpoints.empty()) throw InvalidArgument("checkpoint list is empty");
  if (checkpoints.front() == 0) {
    throw InvalidArgument("checkpoints must be at least 1");
  }
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    if (checkpoints[i] <= checkpoints[i - 1]) {
      throw InvalidArgument("checkpoints must be strictly ascending");
    }
  }
  if (checkpoints.back() > plan.n_permutations) {
    throw InvalidArgument("last checkpoint exceeds the permutation budget");
  }
  return RunSampling(game, plan, checkpoints).points;
}

}  // namespace msa
