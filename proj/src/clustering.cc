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

#include "msa/clustering.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "csv_util.h"
#include "json.hpp"
#include "msa/errors.h"
#include "msa/rng.h"

namespace msa {
namespace {

using json = nlohmann::json;

constexpr std::size_t kMaxLocalPasses = 1000;

// Dense weighted graph at one Louvain level. Self-loops carry the internal
// weight of aggregated communities (counted in both directions).
struct LevelGraph {
  std::size_t n = 0;
  std::vector<double> a;       // n x n
  std::vector<double> degree;  // row sums
  double two_m = 0.0;

  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  void Finish() {
    degree.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) degree[i] += a[i * n + j];
    }
    two_m = std::accumulate(degree.begin(), degree.end(), 0.0);
  }
};

// Local moving phase. Returns the community of each node, renumbered
// contiguously by first appearance; `moved` reports whether any node left
// its singleton.
std::vector<std::size_t> LocalMoving(const LevelGraph& g, double resolution,
                                     SplitMix64& rng, bool* moved) {
  const std::size_t n = g.n;
  std::vector<std::size_t> comm(n);
  std::iota(comm.begin(), comm.end(), 0);
  std::vector<double> tot = g.degree;
  std::vector<double> link(n, 0.0);
  std::vector<std::size_t> touched;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const double eps = 1e-12 * g.two_m;
  *moved = false;

  for (std::size_t pass = 0; pass < kMaxLocalPasses; ++pass) {
    Shuffle(std::span<std::size_t>(order), rng);
    bool any = false;
    for (std::size_t i : order) {
      const std::size_t home = comm[i];
      const double ki = g.degree[i];
      touched.clear();
      for (std::size_t j = 0; j < n; ++j) {
        const double w = g.at(i, j);
        if (j == i || w <= 0.0) continue;
        if (link[comm[j]] == 0.0) touched.push_back(comm[j]);
        link[comm[j]] += w;
      }
      tot[home] -= ki;
      const double scale = resolution * ki / g.two_m;
      std::size_t best = home;
      double best_gain = link[home] - scale * tot[home];
      for (std::size_t c : touched) {
        const double gain = link[c] - scale * tot[c];
        if (gain > best_gain + eps) {
          best = c;
          best_gain = gain;
        }
      }
      tot[best] += ki;
      comm[i] = best;
      if (best != home) any = true;
      for (std::size_t c : touched) link[c] = 0.0;
    }
    if (!any) break;
    *moved = true;
  }

  std::vector<std::size_t> relabel(n, n);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (relabel[comm[i]] == n) relabel[comm[i]] = next++;
    comm[i] = relabel[comm[i]];
  }
  return comm;
}

LevelGraph Aggregate(const LevelGraph& g, const std::vector<std::size_t>& comm) {
  LevelGraph out;
  out.n = *std::max_element(comm.begin(), comm.end()) + 1;
  out.a.assign(out.n * out.n, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = 0; j < g.n; ++j) {
      out.a[comm[i] * out.n + comm[j]] += g.at(i, j);
    }
  }
  out.Finish();
  return out;
}

std::vector<std::size_t> Contiguous(std::vector<std::size_t> labels) {
  std::vector<std::size_t> relabel(labels.size(), labels.size());
  std::size_t next = 0;
  for (auto& l : labels) {
    if (relabel[l] == labels.size()) relabel[l] = next++;
    l = relabel[l];
  }
  return labels;
}

}  // namespace

void SimilarityGraph::Validate() const {
  if (weights.size() != n * n) {
    throw InvalidArgument("graph weight matrix is not " + std::to_string(n) +
                          " x " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (at(i, i) != 0.0) throw InvalidArgument("graph diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      const double w = at(i, j);
      if (!(w >= 0.0 && w <= 1.0)) {
        throw InvalidArgument("graph weights must lie in [0, 1]");
      }
      if (w != at(j, i)) throw InvalidArgument("graph weights must be symmetric");
    }
  }
}

SimilarityGraph BuildSimilarityGraph(std::span<const ValueTensor> modes,
                                     double threshold, unsigned workers) {
  const std::size_t n = modes.size();
  if (n < 2) throw InvalidArgument("similarity graph needs at least 2 players");
  const Shape& shape = modes[0].shape;
  const std::size_t k = modes[0].size();
  for (const auto& m : modes) {
    if (m.shape != shape) {
      throw ShapeMismatch("all contribution tensors must share one shape");
    }
    if (!m.AllFinite()) throw NonFiniteValue("non-finite contribution");
  }
  if (k < 2) throw InvalidArgument("correlation needs at least 2 elements per tensor");
  if (workers == 0) throw InvalidArgument("workers must be positive");

  // Mean-centred copies and their norms.
  std::vector<std::vector<double>> centred(n);
  std::vector<double> norm(n, 0.0);
  SimilarityGraph g;
  g.n = n;
  g.weights.assign(n * n, 0.0);
  g.zero_variance.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& d = modes[i].data;
    const double mean =
        std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(k);
    centred[i].resize(k);
    double ss = 0.0;
    for (std::size_t e = 0; e < k; ++e) {
      centred[i][e] = d[e] - mean;
      ss += centred[i][e] * centred[i][e];
    }
    norm[i] = std::sqrt(ss);
    g.zero_variance[i] = std::all_of(d.begin(), d.end(),
                                     [&](double v) { return v == d[0]; });
  }

  auto fill_row = [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (g.zero_variance[i] || g.zero_variance[j]) continue;
      double dot = 0.0;
      for (std::size_t e = 0; e < k; ++e) dot += centred[i][e] * centred[j][e];
      double w = std::min(1.0, std::abs(dot / (norm[i] * norm[j])));
      if (w < threshold) w = 0.0;
      g.weights[i * n + j] = w;
    }
  };
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fill_row(i);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += workers) fill_row(i);
      });
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) g.weights[j * n + i] = g.weights[i * n + j];
  }
  return g;
}

SimilarityGraph GraphFromWeights(std::size_t n, std::vector<double> weights) {
  SimilarityGraph g;
  g.n = n;
  g.weights = std::move(weights);
  g.zero_variance.assign(n, false);
  g.Validate();
  return g;
}

std::size_t CommunityAssignment::num_communities() const {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

std::vector<std::size_t> CommunityAssignment::Members(std::size_t community) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == community) out.push_back(i);
  }
  return out;
}

double Modularity(const SimilarityGraph& graph,
                  std::span<const std::size_t> labels, double resolution) {
  if (labels.size() != graph.n) {
    throw ShapeMismatch("label count does not match node count");
  }
  const std::size_t n = graph.n;
  std::size_t c = 0;
  for (std::size_t l : labels) c = std::max(c, l + 1);
  std::vector<double> in(c, 0.0), tot(c, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = graph.at(i, j);
      tot[labels[i]] += w;
      two_m += w;
      if (labels[i] == labels[j]) in[labels[i]] += w;
    }
  }
  if (two_m == 0.0) throw InvalidArgument("modularity undefined on an empty graph");
  double q = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    const double t = tot[k] / two_m;
    q += in[k] / two_m - resolution * t * t;
  }
  return q;
}

CommunityAssignment Louvain(const SimilarityGraph& graph, std::uint64_t seed,
                            double resolution) {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw InvalidArgument("resolution must be a positive real");
  }
  LevelGraph level;
  level.n = graph.n;
  level.a = graph.weights;
  for (std::size_t i = 0; i < level.n; ++i) level.a[i * level.n + i] = 0.0;
  level.Finish();
  if (!(level.two_m > 0.0)) {
    throw InvalidArgument("graph has no positive edge; nothing to cluster");
  }

  SplitMix64 rng(seed);
  std::vector<std::size_t> node_comm(graph.n);
  std::iota(node_comm.begin(), node_comm.end(), 0);
  while (true) {
    bool moved = false;
    const std::vector<std::size_t> comm = LocalMoving(level, resolution, rng, &moved);
    if (!moved) break;
    for (auto& c : node_comm) c = comm[c];
    const std::size_t before = level.n;
    level = Aggregate(level, comm);
    if (level.n == 1 || level.n == before) break;
  }

  CommunityAssignment out;
  out.seed = seed;
  out.resolution = resolution;
  out.labels = Contiguous(std::move(node_comm));
  out.modularity = Modularity(graph, out.labels, resolution);

  const std::vector<std::size_t> single(graph.n, 0);
  const double q_single = Modularity(graph, single, resolution);
  if (q_single > out.modularity) {
    out.labels = single;
    out.modularity = q_single;
  }
  return out;
}

ValueTensor LesionPlayers(const Game& game, std::span<const std::size_t> players) {
  Coalition c = Coalition::Grand(game.num_players());
  for (std::size_t p : players) c.Remove(p);
  return game.Evaluate(c);
}

ValueTensor ClusterLesion(const Game& game,
                          const CommunityAssignment& assignment,
                          std::size_t community) {
  if (assignment.labels.size() != game.num_players()) {
    throw ShapeMismatch("assignment covers " +
                        std::to_string(assignment.labels.size()) +
                        " players, game has " +
                        std::to_string(game.num_players()));
  }
  if (community >= assignment.num_communities()) {
    throw InvalidArgument("community " + std::to_string(community) +
                          " does not exist");
  }
  const std::vector<std::size_t> members = assignment.Members(community);
  return LesionPlayers(game, members);
}

std::string EdgeListCsv(const SimilarityGraph& graph) {
  std::ostringstream out;
  out << "i,j,weight\n";
  for (std::size_t i = 0; i < graph.n; ++i) {
    for (std::size_t j = i + 1; j < graph.n; ++j) {
      if (graph.at(i, j) > 0.0) {
        out << i << "," << j << "," << internal::FormatDouble(graph.at(i, j)) << "\n";
      }
    }
  }
  return out.str();
}

SimilarityGraph ParseEdgeList(std::string_view csv_text, std::size_t n,
                              const std::string& source) {
  const auto rows = internal::SplitCsv(csv_text);
  if (rows.empty() || rows[0].fields != std::vector<std::string>{"i", "j", "weight"}) {
    throw ParseError(source, rows.empty() ? 0 : rows[0].line,
                     "header must be 'i,j,weight'");
  }
  struct Edge {
    std::size_t i, j;
    double w;
  };
  std::vector<Edge> edges;
  std::size_t max_node = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    Edge e{};
    if (f.size() != 3 || !internal::ParseSize(f[0], &e.i) ||
        !internal::ParseSize(f[1], &e.j) || !internal::ParseDouble(f[2], &e.w)) {
      throw ParseError(source, rows[r].line, "malformed edge");
    }
    if (e.i == e.j || (n > 0 && (e.i >= n || e.j >= n))) {
      throw ParseError(source, rows[r].line, "edge endpoint out of range");
    }
    max_node = std::max({max_node, e.i, e.j});
    edges.push_back(e);
  }
  if (n == 0) n = edges.empty() ? 0 : max_node + 1;
  std::vector<double> w(n * n, 0.0);
  for (const Edge& e : edges) w[e.i * n + e.j] = w[e.j * n + e.i] = e.w;
  return GraphFromWeights(n, std::move(w));
}

std::string AssignmentToJson(const CommunityAssignment& assignment) {
  json j;
  j["labels"] = assignment.labels;
  j["modularity"] = assignment.modularity;
  j["seed"] = assignment.seed;
  j["resolution"] = assignment.resolution;
  j["communities"] = assignment.num_communities();
  return j.dump(2) + "\n";
}

CommunityAssignment AssignmentFromJson(std::string_view json_text,
                                       const std::string& source) {
  try {
    const json j = json::parse(json_text);
    CommunityAssignment a;
    a.labels = j.at("labels").get<std::vector<std::size_t>>();
    a.modularity = j.at("modularity").get<double>();
    a.seed = j.value("seed", std::uint64_t{0});
    a.resolution = j.value("resolution", 1.0);
    return a;
  } catch (const json::exception& e) {
    throw ParseError(source, 0, e.what());
  }
}

}  // namespace msa
