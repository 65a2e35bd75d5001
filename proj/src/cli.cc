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

#include "msa/cli.h"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "csv_util.h"
#include "json.hpp"
#include "msa/analysis.h"
#include "msa/clustering.h"
#include "msa/errors.h"
#include "msa/mlp.h"
#include "msa/report.h"
#include "msa/result_io.h"
#include "msa/shapley.h"

namespace msa::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Failures that happen while a game is being evaluated map to exit code 3;
// everything else that goes wrong in a command is a configuration problem.
struct EvaluationFailure : Error {
  using Error::Error;
};

template <typename F>
auto Evaluating(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const EvaluationError& e) {
    throw EvaluationFailure(e.what());
  } catch (const MissingEntry& e) {
    throw EvaluationFailure(e.what());
  } catch (const NonFiniteValue& e) {
    throw EvaluationFailure(e.what());
  }
}

std::vector<std::string> SplitOn(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string::npos ? pos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::size_t> ParseIndexList(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& f : SplitOn(s, ',')) {
    std::size_t v;
    if (!internal::ParseSize(f, &v)) {
      throw InvalidArgument("invalid player index '" + f + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::unique_ptr<Game> BuiltinGame(const std::string& spec) {
  const std::size_t colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "glove") {
    if (args.empty()) return MakeReferenceGame(ReferenceGameKind::Glove({0, 1}, {2}));
    const auto sides = SplitOn(args, '/');
    if (sides.size() != 2) {
      throw InvalidArgument("glove game spec is glove:<left>/<right>, e.g. glove:0,1/2");
    }
    return MakeReferenceGame(
        ReferenceGameKind::Glove(ParseIndexList(sides[0]), ParseIndexList(sides[1])));
  }
  if (kind == "additive") {
    if (args.empty()) return MakeReferenceGame(ReferenceGameKind::Additive({2, 5, 3}));
    std::vector<double> w;
    for (const auto& f : SplitOn(args, ',')) {
      double v;
      if (!internal::ParseDouble(f, &v)) throw InvalidArgument("invalid weight '" + f + "'");
      w.push_back(v);
    }
    return MakeReferenceGame(ReferenceGameKind::Additive(std::move(w)));
  }
  if (kind == "majority") {
    if (args.empty()) return MakeReferenceGame(ReferenceGameKind::Majority(3, 2));
    const auto parts = SplitOn(args, ':');
    std::size_t n, q;
    if (parts.size() != 2 || !internal::ParseSize(parts[0], &n) ||
        !internal::ParseSize(parts[1], &q)) {
      throw InvalidArgument("majority game spec is majority:<n>:<quota>");
    }
    return MakeReferenceGame(ReferenceGameKind::Majority(n, q));
  }
  throw InvalidArgument("unknown game '" + spec + "'");
}

std::vector<std::string> InputFiles(const RunConfig& c) {
  std::vector<std::string> files;
  for (const std::string* f : {&c.table, &c.weights, &c.dataset, &c.input,
                               &c.result, &c.graph, &c.similarity}) {
    if (!f->empty()) files.push_back(*f);
  }
  return files;
}

json ConfigToJson(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["game"] = c.game;
  j["table"] = c.table;
  j["weights"] = c.weights;
  j["dataset"] = c.dataset;
  j["input"] = c.input;
  j["result"] = c.result;
  j["graph"] = c.graph;
  j["similarity"] = c.similarity;
  j["permutations"] = c.permutations;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["exact"] = c.exact;
  j["monte_carlo"] = c.monte_carlo;
  j["exact_cap"] = c.exact_cap;
  j["cache"] = c.cache;
  j["element"] = c.element ? json(*c.element) : json(nullptr);
  j["ks"] = c.ks;
  j["order"] = c.order;
  j["resolution"] = c.resolution;
  j["threshold"] = c.threshold;
  j["lesion"] = c.lesion;
  j["out"] = c.out;
  j["formats"] = c.formats;
  return j;
}

// Collects output files and writes them plus the manifest.
class Outputs {
 public:
  Outputs(const RunConfig& config, std::vector<std::string> default_formats)
      : config_(config),
        formats_(config.formats.empty() ? std::move(default_formats)
                                        : config.formats),
        start_(Clock::now()) {}

  bool wants(const std::string& format) const {
    return std::find(formats_.begin(), formats_.end(), format) != formats_.end();
  }

  void Add(const std::string& name, std::string contents) {
    files_.emplace_back(name, std::move(contents));
  }

  void set_evaluations(std::uint64_t n) { evaluations_ = n; }

  // Nothing is written unless every product was produced.
  void Commit(std::ostream& out) {
    const fs::path dir(config_.out);
    for (const auto& [name, contents] : files_) {
      internal::WriteFile(dir / name, contents);
      out << (dir / name).string() << "\n";
    }
    json m;
    m["tool"] = "msa";
    m["version"] = kToolVersion;
    m["config"] = ConfigToJson(config_);
    m["formats"] = formats_;
    json inputs = json::array();
    for (const auto& f : InputFiles(config_)) {
      inputs.push_back({{"path", f}, {"sha256", FileSha256(f)}});
    }
    m["inputs"] = inputs;
    json outputs = json::array();
    for (const auto& [name, contents] : files_) outputs.push_back(name);
    m["outputs"] = outputs;
    m["evaluations"] = evaluations_;
    m["elapsed_s"] = std::chrono::duration<double>(Clock::now() - start_).count();
    internal::WriteFile(dir / "manifest.json", m.dump(2) + "\n");
    out << (dir / "manifest.json").string() << "\n";
  }

 private:
  const RunConfig& config_;
  std::vector<std::string> formats_;
  Clock::time_point start_;
  std::vector<std::pair<std::string, std::string>> files_;
  std::uint64_t evaluations_ = 0;
};

SamplingPlan PlanFromConfig(const RunConfig& c) {
  if (c.permutations == 0) throw InvalidArgument("--permutations must be at least 1");
  if (c.workers == 0) throw InvalidArgument("--workers must be at least 1");
  if (c.exact && c.monte_carlo) {
    throw InvalidArgument("--exact and --monte-carlo are mutually exclusive");
  }
  SamplingPlan plan;
  plan.mode = c.exact         ? SamplingMode::kExact
              : c.monte_carlo ? SamplingMode::kMonteCarlo
                              : SamplingMode::kAuto;
  plan.n_permutations = c.permutations;
  plan.seed = c.seed;
  plan.workers = c.workers;
  plan.exact_cap = c.exact_cap;
  plan.cache_capacity = c.cache;
  return plan;
}

// Contribution matrix from --result or --input.
ContributionMatrix LoadContributions(const RunConfig& c) {
  if (!c.result.empty()) {
    return ContributionMatrix::FromShapleyResult(LoadResult(c.result));
  }
  if (!c.input.empty()) return LoadContributionMatrix(c.input);
  throw InvalidArgument("need --result <result.json> or --input <contributions.csv>");
}

ShapleyResult RequireResult(const RunConfig& c) {
  if (c.result.empty()) throw InvalidArgument("need --result <result.json>");
  return LoadResult(c.result);
}

void CmdAttribute(const RunConfig& c, std::ostream& out) {
  const SamplingPlan plan = PlanFromConfig(c);
  const std::unique_ptr<Game> game = BuildGame(c);
  Outputs outputs(c, {"json", "csv"});
  const ShapleyResult r = Evaluating([&] { return ShapleyAuto(*game, plan); });
  outputs.set_evaluations(r.evaluations);
  if (outputs.wants("json")) outputs.Add("result.json", ResultToJson(r));
  if (outputs.wants("csv")) outputs.Add("modes.csv", ModesToCsv(r));
  if (outputs.wants("svg")) {
    outputs.Add("contributions.svg",
                RenderHeatmapSvg(ContributionHeatmap(ContributionMatrix::FromShapleyResult(r))));
  }
  outputs.Commit(out);
}

void CmdIdc(const RunConfig& c, std::ostream& out) {
  const IdcReport report = ComputeIdc(LoadContributions(c));
  Outputs outputs(c, {"json", "csv"});
  if (outputs.wants("csv")) outputs.Add("idc.csv", IdcReportToCsv(report));
  if (outputs.wants("json")) outputs.Add("idc.json", IdcReportToJson(report));
  outputs.Commit(out);
}

void CmdSimilarity(const RunConfig& c, std::ostream& out) {
  const SimilarityMatrix s = InterclassSimilarity(LoadContributions(c));
  Outputs outputs(c, {"json", "csv"});
  if (outputs.wants("csv")) outputs.Add("similarity.csv", SimilarityToCsv(s));
  if (outputs.wants("json")) outputs.Add("similarity.json", SimilarityToJson(s));
  if (outputs.wants("svg")) {
    outputs.Add("similarity.svg", RenderHeatmapSvg(SimilarityHeatmap(s)));
  }
  outputs.Commit(out);
}

void CmdCluster(const RunConfig& c, std::ostream& out) {
  SimilarityGraph graph;
  if (!c.graph.empty()) {
    graph = ParseEdgeList(internal::ReadFile(c.graph), 0, c.graph);
  } else {
    const ContributionMatrix m = LoadContributions(c);
    std::vector<ValueTensor> rows;
    for (std::size_t i = 0; i < m.players; ++i) {
      rows.emplace_back(Shape{m.functions},
                        std::vector<double>(m.values.begin() + static_cast<std::ptrdiff_t>(i * m.functions),
                                            m.values.begin() + static_cast<std::ptrdiff_t>((i + 1) * m.functions)));
    }
    graph = BuildSimilarityGraph(rows, c.threshold, c.workers);
  }
  const CommunityAssignment a = Louvain(graph, c.seed, c.resolution);
  Outputs outputs(c, {"json", "csv"});
  if (outputs.wants("csv")) outputs.Add("edges.csv", EdgeListCsv(graph));
  if (outputs.wants("json")) outputs.Add("assignment.json", AssignmentToJson(a));
  if (c.lesion) {
    const std::unique_ptr<Game> game = BuildGame(c);
    const std::vector<std::string> elements = game->element_labels();
    std::ostringstream csv;
    csv << "community,members";
    for (const auto& e : elements) csv << "," << e;
    csv << "\n";
    json rows = json::array();
    for (std::size_t k = 0; k < a.num_communities(); ++k) {
      const ValueTensor v = Evaluating([&] { return ClusterLesion(*game, a, k); });
      const std::vector<std::size_t> members = a.Members(k);
      csv << k << ",";
      for (std::size_t i = 0; i < members.size(); ++i) csv << (i ? " " : "") << members[i];
      for (double x : v.data) csv << "," << internal::FormatDouble(x);
      csv << "\n";
      rows.push_back({{"community", k}, {"members", members}, {"value", v.data}});
    }
    outputs.set_evaluations(a.num_communities());
    if (outputs.wants("csv")) outputs.Add("cluster_lesion.csv", csv.str());
    if (outputs.wants("json")) outputs.Add("cluster_lesion.json", rows.dump(2) + "\n");
  }
  outputs.Commit(out);
}

void CmdLesionSweep(const RunConfig& c, std::ostream& out) {
  const ShapleyResult r = RequireResult(c);
  const std::unique_ptr<Game> game = BuildGame(c);
  LesionOrder order;
  if (c.order == "top" || c.order == "top_first") {
    order = LesionOrder::kTopFirst;
  } else if (c.order == "bottom" || c.order == "bottom_first") {
    order = LesionOrder::kBottomFirst;
  } else {
    throw InvalidArgument("--order must be top or bottom");
  }
  const std::size_t element = c.element.value_or(NumElements(r.shape) - 1);
  const std::vector<SweepPoint> points =
      Evaluating([&] { return LesionSweep(*game, r, element, order, c.ks); });

  Outputs outputs(c, {"json", "csv"});
  outputs.set_evaluations(points.size());
  std::ostringstream csv;
  csv << "k,lesioned,value";
  for (const auto& e : game->element_labels()) csv << "," << e;
  csv << "\n";
  json rows = json::array();
  for (const auto& pt : points) {
    csv << pt.k << ",";
    for (std::size_t i = 0; i < pt.lesioned.size(); ++i) csv << (i ? " " : "") << pt.lesioned[i];
    csv << "," << internal::FormatDouble(pt.value.data[element]);
    for (double x : pt.value.data) csv << "," << internal::FormatDouble(x);
    csv << "\n";
    rows.push_back({{"k", pt.k},
                    {"lesioned", pt.lesioned},
                    {"value", pt.value.data[element]},
                    {"values", pt.value.data}});
  }
  json doc = {{"element", element}, {"order", c.order}, {"points", rows}};
  if (outputs.wants("csv")) outputs.Add("sweep.csv", csv.str());
  if (outputs.wants("json")) outputs.Add("sweep.json", doc.dump(2) + "\n");
  outputs.Commit(out);
}

void CmdWeightImportance(const RunConfig& c, std::ostream& out) {
  if (c.weights.empty()) throw InvalidArgument("need --weights <model.json>");
  const MlpModel model = LoadMlp(c.weights);
  const ShapleyResult r = RequireResult(c);
  const WeightImportanceReport rep = WeightImportanceStats(model, r, c.element);
  Outputs outputs(c, {"json", "csv"});
  std::ostringstream csv;
  csv << "neuron,mean_abs_weight,shapley\n";
  json neurons = json::array();
  for (std::size_t j = 0; j < rep.neurons.size(); ++j) {
    csv << r.player_labels[j] << ","
        << internal::FormatDouble(rep.neurons[j].mean_abs_weight) << ","
        << internal::FormatDouble(rep.neurons[j].shapley) << "\n";
    neurons.push_back({{"neuron", r.player_labels[j]},
                       {"mean_abs_weight", rep.neurons[j].mean_abs_weight},
                       {"shapley", rep.neurons[j].shapley}});
  }
  json doc = {{"neurons", neurons},
              {"pearson_r", rep.pearson_r},
              {"zero_variance", rep.zero_variance}};
  if (outputs.wants("csv")) outputs.Add("weight_importance.csv", csv.str());
  if (outputs.wants("json")) outputs.Add("weight_importance.json", doc.dump(2) + "\n");
  outputs.Commit(out);
}

void CmdReport(const RunConfig& c, std::ostream& out) {
  Outputs outputs(c, {"svg"});
  std::optional<SimilarityMatrix> sim;
  if (!c.similarity.empty()) {
    sim = SimilarityFromCsv(internal::ReadFile(c.similarity), c.similarity);
  }
  if (!c.result.empty() || !c.input.empty()) {
    const ContributionMatrix m = LoadContributions(c);
    outputs.Add("contributions.svg", RenderHeatmapSvg(ContributionHeatmap(m)));
    if (!sim && m.players >= 2 && m.functions >= 2) sim = InterclassSimilarity(m);
  } else if (!sim) {
    throw InvalidArgument("need --result, --input or --similarity");
  }
  if (sim) outputs.Add("similarity.svg", RenderHeatmapSvg(SimilarityHeatmap(*sim)));
  outputs.Commit(out);
}

void AddGameOptions(CLI::App* app, RunConfig& c) {
  app->add_option("--game", c.game,
                  "glove[:L/R] | additive[:w,...] | majority[:n:quota] | tabular | mlp");
  app->add_option("--table", c.table, "coalition-table CSV");
  app->add_option("--weights", c.weights, "MLP weight file (JSON)");
  app->add_option("--dataset", c.dataset, "labelled dataset CSV");
}

void AddOutputOptions(CLI::App* app, RunConfig& c) {
  app->add_option("--out", c.out, "output directory");
  app->add_option("--format", c.formats, "json,csv,svg")
      ->delimiter(',')
      ->check(CLI::IsMember({"json", "csv", "svg"}));
}

}  // namespace

std::unique_ptr<Game> BuildGame(const RunConfig& c) {
  std::string kind = c.game;
  if (kind.empty()) {
    if (!c.table.empty()) {
      kind = "tabular";
    } else if (!c.weights.empty() && !c.dataset.empty()) {
      kind = "mlp";
    } else {
      throw InvalidArgument("no game source: use --game, --table or --weights/--dataset");
    }
  }
  if (kind == "tabular") {
    if (c.table.empty()) throw InvalidArgument("--game tabular needs --table");
    return std::make_unique<TabularGame>(LoadTabularGame(c.table));
  }
  if (kind == "mlp") {
    if (c.weights.empty() || c.dataset.empty()) {
      throw InvalidArgument("--game mlp needs --weights and --dataset");
    }
    auto model = std::make_shared<const MlpModel>(LoadMlp(c.weights));
    auto data = std::make_shared<const LabeledDataset>(LoadDataset(c.dataset));
    return std::make_unique<AccuracyGame>(model, data);
  }
  return BuiltinGame(kind);
}

std::string FileSha256(const std::string& path) {
  const std::string bytes = internal::ReadFile(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed for " + path);
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  if (const char* env = std::getenv("MSA_WORKERS")) {
    std::size_t w;
    if (!internal::ParseSize(env, &w) || w == 0) {
      err << "error: MSA_WORKERS must be a positive integer\n";
      return kExitUsage;
    }
    c.workers = static_cast<unsigned>(w);
  }

  CLI::App app{"Multi-perturbation Shapley analysis of lesionable models", "msa"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CLI::App* attribute = app.add_subcommand("attribute", "Shapley Modes of a game");
  AddGameOptions(attribute, c);
  attribute->add_option("--permutations", c.permutations, "sampled orderings (p)");
  attribute->add_option("--seed", c.seed, "64-bit seed");
  attribute->add_option("--workers", c.workers, "worker threads (env MSA_WORKERS)");
  attribute->add_flag("--exact", c.exact, "exact enumeration (n <= cap)");
  attribute->add_flag("--monte-carlo", c.monte_carlo, "always sample");
  attribute->add_option("--exact-cap", c.exact_cap, "largest n for exact mode");
  attribute->add_option("--cache", c.cache, "LRU cache entries (0 = off)");
  AddOutputOptions(attribute, c);

  CLI::App* idc = app.add_subcommand("idc", "Index of distributed computation");
  idc->add_option("--input", c.input, "contribution-matrix CSV");
  idc->add_option("--result", c.result, "result.json");
  AddOutputOptions(idc, c);

  CLI::App* similarity = app.add_subcommand("similarity", "Inter-function similarity");
  similarity->add_option("--input", c.input, "contribution-matrix CSV");
  similarity->add_option("--result", c.result, "result.json");
  AddOutputOptions(similarity, c);

  CLI::App* cluster = app.add_subcommand("cluster", "Louvain clustering of players");
  cluster->add_option("--input", c.input, "contribution-matrix CSV (rows = players)");
  cluster->add_option("--result", c.result, "result.json");
  cluster->add_option("--graph", c.graph, "edge-list CSV i,j,weight");
  cluster->add_option("--seed", c.seed, "visit-order seed");
  cluster->add_option("--resolution", c.resolution, "modularity resolution");
  cluster->add_option("--threshold", c.threshold, "zero edges below this weight");
  cluster->add_option("--workers", c.workers, "worker threads");
  cluster->add_flag("--lesion", c.lesion, "lesion each community in the game");
  AddGameOptions(cluster, c);
  AddOutputOptions(cluster, c);

  CLI::App* sweep = app.add_subcommand("lesion-sweep", "Top/bottom-k lesion sweep");
  AddGameOptions(sweep, c);
  sweep->add_option("--result", c.result, "result.json")->required();
  sweep->add_option("--element", c.element, "output element to rank by");
  sweep->add_option("--ks", c.ks, "lesion sizes, ascending")->delimiter(',');
  sweep->add_option("--order", c.order, "top | bottom");
  AddOutputOptions(sweep, c);

  CLI::App* weight = app.add_subcommand("weight-importance", "Mean |weight| vs Shapley value");
  weight->add_option("--weights", c.weights, "MLP weight file")->required();
  weight->add_option("--result", c.result, "result.json")->required();
  weight->add_option("--element", c.element, "output element (default: last)");
  AddOutputOptions(weight, c);

  CLI::App* report = app.add_subcommand("report", "SVG heatmaps");
  report->add_option("--result", c.result, "result.json");
  report->add_option("--input", c.input, "contribution-matrix CSV");
  report->add_option("--similarity", c.similarity, "similarity CSV");
  AddOutputOptions(report, c);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const CLI::App* sub = app.get_subcommands().front();
  c.command = sub->get_name();
  try {
    if (sub == attribute) CmdAttribute(c, out);
    else if (sub == idc) CmdIdc(c, out);
    else if (sub == similarity) CmdSimilarity(c, out);
    else if (sub == cluster) CmdCluster(c, out);
    else if (sub == sweep) CmdLesionSweep(c, out);
    else if (sub == weight) CmdWeightImportance(c, out);
    else if (sub == report) CmdReport(c, out);
  } catch (const EvaluationFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitEvaluation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace msa::cli
