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

#ifndef MSA_TESTS_ORACLE_H_
#define MSA_TESTS_ORACLE_H_

// Slow, obviously-correct reference implementations used only by tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "msa/game.h"

namespace msa::oracle {

// Average marginal contribution over every one of the n! orderings. Values
// are tabulated by bitmask first so n = 10 stays quick.
inline std::vector<std::vector<double>> BruteForceShapley(const Game& game) {
  const std::size_t n = game.num_players();
  const std::size_t k = NumElements(game.spec().output_shape);
  std::vector<std::vector<double>> value(std::size_t{1} << n);
  for (std::uint64_t mask = 0; mask < value.size(); ++mask) {
    value[mask] = game.Evaluate(Coalition::FromMask(n, mask)).data;
  }
  std::vector<std::vector<long double>> sum(n, std::vector<long double>(k, 0.0L));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::uint64_t count = 0;
  do {
    std::uint64_t mask = 0;
    for (std::size_t p : order) {
      const std::uint64_t next = mask | (std::uint64_t{1} << p);
      for (std::size_t e = 0; e < k; ++e) sum[p][e] += value[next][e] - value[mask][e];
      mask = next;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  std::vector<std::vector<double>> out(n, std::vector<double>(k));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t e = 0; e < k; ++e) {
      out[i][e] = static_cast<double>(sum[i][e] / static_cast<long double>(count));
    }
  }
  return out;
}

// Full-table edit distance over bytes.
inline std::size_t EditDistance(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                          std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

// Textbook single-expression Pearson in long double.
inline double PearsonDirect(const std::vector<double>& x, const std::vector<double>& y) {
  const long double n = static_cast<long double>(x.size());
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  return static_cast<double>((n * sxy - sx * sy) /
                             std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy)));
}

// Modularity by direct double sum over node pairs.
inline double ModularityDirect(const std::vector<double>& w, std::size_t n,
                               const std::vector<std::size_t>& labels,
                               double gamma = 1.0) {
  std::vector<long double> k(n, 0.0L);
  long double two_m = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k[i] += w[i * n + j];
    two_m += k[i];
  }
  long double q = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (labels[i] == labels[j]) q += w[i * n + j] - gamma * k[i] * k[j] / two_m;
    }
  }
  return static_cast<double>(q / two_m);
}

// Complete table with values drawn uniformly from [-1, 1].
inline TabularGame RandomTabularGame(std::size_t n, Shape shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TabularGame g(n, shape);
  const std::size_t k = NumElements(shape);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<double> v(k);
    for (double& x : v) x = u(rng);
    g.Set(Coalition::FromMask(n, mask), ValueTensor(shape, std::move(v)));
  }
  return g;
}

// Same partition up to relabeling.
inline bool SamePartition(const std::vector<std::size_t>& a,
                          const std::vector<std::size_t>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    }
  }
  return true;
}

// Two unit-weight 4-cliques {0..3}, {4..7} joined by a 0.1 edge (3,4).
inline std::vector<double> TwoCliqueWeights() {
  const std::size_t n = 8;
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && (i < 4) == (j < 4)) w[i * n + j] = 1.0;
    }
  }
  w[3 * n + 4] = w[4 * n + 3] = 0.1;
  return w;
}

// One element of another game's output, as a scalar game.
class ElementGame : public Game {
 public:
  ElementGame(const Game& base, std::size_t element) : base_(base), element_(element) {}
  GameSpec spec() const override { return {base_.num_players(), {}, "element"}; }

 protected:
  ValueTensor DoEvaluate(const Coalition& c) const override {
    return ValueTensor::Scalar(base_.Evaluate(c)[element_]);
  }

 private:
  const Game& base_;
  std::size_t element_;
};

inline std::filesystem::path FreshDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("msa_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace msa::oracle

#endif  // MSA_TESTS_ORACLE_H_
