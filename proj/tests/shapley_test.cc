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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "msa/errors.h"
#include "oracle.h"

namespace msa {
namespace {

std::unique_ptr<Game> Glove() {
  return MakeReferenceGame(ReferenceGameKind::Glove({0, 1}, {2}));
}

std::unique_ptr<Game> Additive() {
  return MakeReferenceGame(ReferenceGameKind::Additive({2, 5, 3}));
}

SamplingPlan Sampled(std::uint64_t p, std::uint64_t seed, unsigned workers = 1) {
  SamplingPlan plan;
  plan.mode = SamplingMode::kMonteCarlo;
  plan.n_permutations = p;
  plan.seed = seed;
  plan.workers = workers;
  return plan;
}

double SumOf(const ShapleyResult& r, std::size_t e) {
  double s = 0.0;
  for (const auto& m : r.modes) s += m[e];
  return s;
}

TEST(PermutationTest, RejectsNonBijection) {
  EXPECT_THROW(Permutation({0, 0, 1}), InvalidArgument);
  EXPECT_THROW(Permutation({0, 3, 1}), InvalidArgument);
  EXPECT_NO_THROW(Permutation({2, 0, 1}));
}

TEST(PermutationTest, SampleIsReproducibleBijection) {
  std::set<std::vector<std::size_t>> seen;
  for (std::uint64_t k = 0; k < 200; ++k) {
    const Permutation p = Permutation::Sample(5, 42, k);
    EXPECT_EQ(p.order(), Permutation::Sample(5, 42, k).order());
    std::vector<std::size_t> sorted = p.order();
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
    seen.insert(p.order());
  }
  // 200 draws with replacement from 120 orderings cover about 97.
  EXPECT_GT(seen.size(), 80u);
}

TEST(MarginalTest, SpecExamples) {
  EXPECT_EQ(MarginalContribution(*Additive(), Coalition::FromBitstring("100"), 2)[0], 3.0);
  auto majority = MakeReferenceGame(ReferenceGameKind::Majority(3, 2));
  EXPECT_EQ(MarginalContribution(*majority, Coalition::FromBitstring("100"), 1)[0], 1.0);
  EXPECT_EQ(MarginalContribution(*Glove(), Coalition(3), 2)[0], 0.0);
}

TEST(MarginalTest, PlayerAlreadyPresent) {
  EXPECT_THROW(MarginalContribution(*Additive(), Coalition::FromBitstring("100"), 0),
               InvalidArgument);
}

TEST(ExactTest, Glove) {
  const ShapleyResult r = ShapleyExact(*Glove());
  EXPECT_TRUE(r.exact);
  EXPECT_FALSE(r.standard_error.has_value());
  EXPECT_NEAR(r.modes[0][0], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(r.modes[1][0], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(r.modes[2][0], 2.0 / 3.0, 1e-15);
}

TEST(ExactTest, Additive) {
  const ShapleyResult r = ShapleyExact(*Additive());
  EXPECT_NEAR(r.modes[0][0], 2.0, 1e-12);
  EXPECT_NEAR(r.modes[1][0], 5.0, 1e-12);
  EXPECT_NEAR(r.modes[2][0], 3.0, 1e-12);
}

TEST(ExactTest, TwoPlayerTable) {
  const TabularGame g = ParseTabularGame("coalition,v0\n00,0\n10,1\n01,2\n11,5\n");
  const ShapleyResult r = ShapleyExact(g);
  EXPECT_NEAR(r.modes[0][0], 2.0, 1e-15);
  EXPECT_NEAR(r.modes[1][0], 3.0, 1e-15);
}

TEST(ExactTest, CoalitionWeightingMatchesOrderingsUpToSix) {
  std::mt19937_64 rng(11);
  for (std::size_t n = 1; n <= 6; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const TabularGame g = oracle::RandomTabularGame(n, {2}, rng);
      const ShapleyResult r = ShapleyExact(g);
      const auto brute = oracle::BruteForceShapley(g);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t e = 0; e < 2; ++e) {
          EXPECT_NEAR(r.modes[i][e], brute[i][e], 1e-12) << "n=" << n;
        }
      }
    }
  }
}

TEST(ExactTest, CapEnforced) {
  std::vector<double> w(13, 1.0);
  auto g = MakeReferenceGame(ReferenceGameKind::Additive(w));
  SamplingPlan plan;
  plan.mode = SamplingMode::kExact;
  EXPECT_THROW(ShapleyAuto(*g, plan), CapExceeded);
  EXPECT_THROW(ShapleyExact(*g), CapExceeded);
  plan.exact_cap = 13;
  EXPECT_TRUE(ShapleyAuto(*g, plan).exact);
  plan.exact_cap = kMaxExactCap + 1;
  EXPECT_THROW(ShapleyAuto(*g, plan), InvalidArgument);
}

TEST(AutoTest, Dispatch) {
  EXPECT_TRUE(ShapleyAuto(*Glove(), SamplingPlan{}).exact);
  std::vector<double> w(100, 0.5);
  auto big = MakeReferenceGame(ReferenceGameKind::Additive(w));
  SamplingPlan plan;
  plan.n_permutations = 3;
  const ShapleyResult r = ShapleyAuto(*big, plan);
  EXPECT_FALSE(r.exact);
  EXPECT_EQ(r.n_permutations_used, 3u);
  plan.mode = SamplingMode::kMonteCarlo;
  EXPECT_FALSE(ShapleyAuto(*Glove(), plan).exact);
}

TEST(SampledTest, ZeroPermutationsRejected) {
  EXPECT_THROW(ShapleySampled(*Glove(), Sampled(0, 1)), InvalidArgument);
}

TEST(SampledTest, SinglePermutationTelescopes) {
  std::mt19937_64 rng(3);
  const TabularGame g = oracle::RandomTabularGame(7, {}, rng);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ShapleyResult r = ShapleySampled(g, Sampled(1, seed));
    const double target = r.grand_value[0] - r.empty_value[0];
    EXPECT_NEAR(SumOf(r, 0), target, 1e-12);
    for (const auto& se : *r.standard_error) EXPECT_EQ(se[0], 0.0);
  }
}

TEST(SampledTest, AdditiveIsExactForAnyStream) {
  for (std::uint64_t p : {1u, 7u, 100u}) {
    const ShapleyResult r = ShapleySampled(*Additive(), Sampled(p, p * 31));
    EXPECT_EQ(r.modes[0][0], 2.0);
    EXPECT_EQ(r.modes[1][0], 5.0);
    EXPECT_EQ(r.modes[2][0], 3.0);
  }
}

TEST(SampledTest, GloveWithinFiveStandardErrors) {
  const ShapleyResult r = ShapleySampled(*Glove(), Sampled(5000, 2024));
  const double exact[3] = {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0};
  for (std::size_t i = 0; i < 3; ++i) {
    const double se = (*r.standard_error)[i][0];
    EXPECT_GT(se, 0.0);
    EXPECT_LE(std::abs(r.modes[i][0] - exact[i]), 5.0 * se);
  }
  EXPECT_EQ(r.evaluations, 2u + 5000u * 4u);
}

TEST(SampledTest, StandardErrorMatchesDirectFormula) {
  const std::uint64_t p = 50;
  const ShapleyResult r = ShapleySampled(*Glove(), Sampled(p, 77));
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<double> marginals;
    for (std::uint64_t k = 0; k < p; ++k) {
      const Permutation perm = Permutation::Sample(3, 77, k);
      Coalition s(3);
      for (std::size_t pos = 0; pos < 3; ++pos) {
        if (perm[pos] == i) {
          marginals.push_back(MarginalContribution(*Glove(), s, i)[0]);
          break;
        }
        s.Add(perm[pos]);
      }
    }
    double mean = 0.0;
    for (double m : marginals) mean += m;
    mean /= p;
    double ss = 0.0;
    for (double m : marginals) ss += (m - mean) * (m - mean);
    EXPECT_NEAR(r.modes[i][0], mean, 1e-14);
    EXPECT_NEAR((*r.standard_error)[i][0], std::sqrt(ss / (p - 1)) / std::sqrt(double(p)), 1e-14);
  }
}

TEST(SampledTest, EvaluationFailureNamesCoalition) {
  const TabularGame g = ParseTabularGame("coalition,v0\n000,0\n111,1\n100,0\n");
  try {
    ShapleySampled(g, Sampled(10, 1));
    FAIL();
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.coalition().size(), 3u);
    EXPECT_NE(std::string(e.what()).find(e.coalition()), std::string::npos);
  }
}

TEST(AxiomTest, Efficiency) {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const TabularGame g = oracle::RandomTabularGame(6, {3}, rng);
    for (const ShapleyResult& r : {ShapleyExact(g), ShapleySampled(g, Sampled(300, rep))}) {
      for (std::size_t e = 0; e < 3; ++e) {
        const double target = r.grand_value[e] - r.empty_value[e];
        EXPECT_LE(std::abs(SumOf(r, e) - target), 1e-9 * std::max(1.0, std::abs(target)));
      }
    }
  }
}

TEST(AxiomTest, SymmetryOnMajority) {
  auto g = MakeReferenceGame(ReferenceGameKind::Majority(9, 5));
  const ShapleyResult r = ShapleyExact(*g);
  for (const auto& m : r.modes) EXPECT_NEAR(m[0], r.modes[0][0], 1e-12);
}

TEST(AxiomTest, DummyIsBitwiseZero) {
  auto g = MakeReferenceGame(ReferenceGameKind::Additive({0.3, 0.0, 1.7, 0.1}));
  EXPECT_EQ(ShapleyExact(*g).modes[1][0], 0.0);
  const ShapleyResult s = ShapleySampled(*g, Sampled(500, 8));
  EXPECT_EQ(s.modes[1][0], 0.0);
  EXPECT_EQ((*s.standard_error)[1][0], 0.0);
}

TEST(AxiomTest, Additivity) {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    const TabularGame a = oracle::RandomTabularGame(5, {}, rng);
    const TabularGame b = oracle::RandomTabularGame(5, {}, rng);
    const ShapleyResult ra = ShapleyExact(a);
    const ShapleyResult rb = ShapleyExact(b);
    const ShapleyResult rs = ShapleyExact(TabularGame::Sum(a, b));
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_NEAR(rs.modes[i][0], ra.modes[i][0] + rb.modes[i][0], 1e-12);
    }
  }
}

TEST(PropertyTest, UnbiasedAcrossSeeds) {
  const double exact[3] = {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0};
  const int seeds = 200;
  double mean[3] = {0, 0, 0};
  double var[3] = {0, 0, 0};
  for (int s = 0; s < seeds; ++s) {
    const ShapleyResult r = ShapleySampled(*Glove(), Sampled(200, 1000 + s));
    for (std::size_t i = 0; i < 3; ++i) {
      mean[i] += r.modes[i][0] / seeds;
      var[i] += std::pow((*r.standard_error)[i][0], 2) / seeds;
    }
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const double pooled = std::sqrt(var[i] / seeds);
    EXPECT_LT(std::abs(mean[i] - exact[i]), 3.0 * pooled) << "player " << i;
  }
}

TEST(PropertyTest, ModesMatchScalarRuns) {
  std::mt19937_64 rng(29);
  const TabularGame g = oracle::RandomTabularGame(5, {4}, rng);
  const ShapleyResult whole = ShapleySampled(g, Sampled(250, 99));
  for (std::size_t e = 0; e < 4; ++e) {
    const oracle::ElementGame slice(g, e);
    const ShapleyResult r = ShapleySampled(slice, Sampled(250, 99));
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_EQ(r.modes[i][0], whole.modes[i][e]);
      EXPECT_EQ((*r.standard_error)[i][0], (*whole.standard_error)[i][e]);
    }
  }
}

TEST(PropertyTest, WorkerCountDoesNotChangeResult) {
  std::mt19937_64 rng(31);
  const TabularGame g = oracle::RandomTabularGame(8, {2}, rng);
  const ShapleyResult a = ShapleySampled(g, Sampled(777, 5, 1));
  const ShapleyResult b = ShapleySampled(g, Sampled(777, 5, 4));
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(a.modes[i], b.modes[i]);
    EXPECT_EQ((*a.standard_error)[i], (*b.standard_error)[i]);
  }
}

TEST(CacheTest, CacheDoesNotChangeResultAndCountsHits) {
  SamplingPlan plan = Sampled(400, 12);
  const ShapleyResult plain = ShapleySampled(*Glove(), plan);
  plan.cache_capacity = 64;
  const ShapleyResult cached = ShapleySampled(*Glove(), plan);
  EXPECT_EQ(plain.modes, cached.modes);
  EXPECT_GT(cached.cache_hits, 0u);
  EXPECT_EQ(plain.cache_hits, 0u);
}

class CountingCloneGame : public Game {
 public:
  GameSpec spec() const override { return {4, {}, "clone"}; }
  bool clone_per_worker() const override { return true; }
  std::unique_ptr<Game> Clone() const override {
    return std::make_unique<CountingCloneGame>();
  }

 protected:
  ValueTensor DoEvaluate(const Coalition& c) const override {
    ++calls_;  // unsynchronised on purpose: each worker owns a clone
    return ValueTensor::Scalar(static_cast<double>(c.Count() * c.Count()));
  }

 private:
  mutable std::uint64_t calls_ = 0;
};

TEST(CloneTest, ClonePerWorkerGamesAgree) {
  CountingCloneGame g;
  const ShapleyResult a = ShapleySampled(g, Sampled(300, 4, 1));
  const ShapleyResult b = ShapleySampled(g, Sampled(300, 4, 3));
  EXPECT_EQ(a.modes, b.modes);
}

TEST(TraceTest, SingleCheckpointEqualsSampled) {
  const SamplingPlan plan = Sampled(400, 8);
  const std::vector<std::uint64_t> cps = {400};
  const auto trace = ConvergenceTrace(*Glove(), plan, cps);
  const ShapleyResult r = ShapleySampled(*Glove(), plan);
  ASSERT_EQ(trace.size(), 1u);
  EXPECT_EQ(trace[0].modes, r.modes);
  EXPECT_EQ(trace[0].standard_error, *r.standard_error);
}

TEST(TraceTest, PrefixesOfTheSameStream) {
  const std::vector<std::uint64_t> cps = {10, 100, 1000};
  const auto trace = ConvergenceTrace(*Glove(), Sampled(1000, 3), cps);
  ASSERT_EQ(trace.size(), 3u);
  for (std::size_t c = 0; c < cps.size(); ++c) {
    EXPECT_EQ(trace[c].n_permutations, cps[c]);
    EXPECT_EQ(trace[c].modes, ShapleySampled(*Glove(), Sampled(cps[c], 3)).modes);
  }
}

TEST(TraceTest, AdditiveIsConstant) {
  const std::vector<std::uint64_t> cps = {1, 5, 50};
  for (const auto& pt : ConvergenceTrace(*Additive(), Sampled(50, 1), cps)) {
    EXPECT_EQ(pt.modes[1][0], 5.0);
  }
}

TEST(TraceTest, ErrorShrinksAcrossRepetitions) {
  const double exact[3] = {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0};
  const std::vector<std::uint64_t> cps = {10, 100, 1000};
  int improved = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto trace = ConvergenceTrace(*Glove(), Sampled(1000, 500 + s), cps);
    auto err = [&](const TracePoint& pt) {
      double e = 0.0;
      for (std::size_t i = 0; i < 3; ++i) e = std::max(e, std::abs(pt.modes[i][0] - exact[i]));
      return e;
    };
    if (err(trace.back()) < err(trace.front())) ++improved;
  }
  EXPECT_GE(improved, 95);
}

TEST(TraceTest, RejectsBadCheckpoints) {
  const SamplingPlan plan = Sampled(100, 1);
  EXPECT_THROW(ConvergenceTrace(*Glove(), plan, {}), InvalidArgument);
  const std::vector<std::uint64_t> unsorted = {50, 10};
  EXPECT_THROW(ConvergenceTrace(*Glove(), plan, unsorted), InvalidArgument);
  const std::vector<std::uint64_t> too_many = {10, 200};
  EXPECT_THROW(ConvergenceTrace(*Glove(), plan, too_many), InvalidArgument);
}

}  // namespace
}  // namespace msa
