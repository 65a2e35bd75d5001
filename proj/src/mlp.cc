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

#include "msa/mlp.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csv_util.h"
#include "json.hpp"
#include "msa/errors.h"
#include "msa/stats.h"

namespace msa {
namespace {

using json = nlohmann::json;

double Activate(Activation a, double z) {
  switch (a) {
    case Activation::kRelu:
      return z > 0.0 ? z : 0.0;
    case Activation::kTanh:
      return std::tanh(z);
    case Activation::kSigmoid:
      return 1.0 / (1.0 + std::exp(-z));
  }
  return z;
}

void CheckFinite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw NonFiniteValue(std::string("non-finite value in ") + what);
    }
  }
}

// w2 * masked + b2, with lesioned activations replaced by exactly 0.
// Shared by ForwardMasked and AccuracyGame so both produce identical scores.
void OutputLayer(const MlpModel& m, std::span<const double> hidden,
                 const std::vector<char>& intact, std::span<double> scores) {
  const std::size_t h = m.hidden();
  for (std::size_t c = 0; c < m.classes(); ++c) {
    const double* w = m.w2.data.data() + c * h;
    double s = m.b2[c];
    for (std::size_t j = 0; j < h; ++j) {
      const double a = intact[j] ? hidden[j] : 0.0;
      s += w[j] * a;
    }
    scores[c] = s;
  }
}

std::vector<char> MaskFlags(const Coalition& mask, std::size_t hidden) {
  if (mask.width() != hidden) {
    throw ShapeMismatch("mask width " + std::to_string(mask.width()) +
                        " does not match hidden count " +
                        std::to_string(hidden));
  }
  std::vector<char> flags(hidden);
  for (std::size_t j = 0; j < hidden; ++j) flags[j] = mask.Contains(j) ? 1 : 0;
  return flags;
}

std::vector<std::size_t> ClassCounts(const LabeledDataset& data,
                                     std::size_t classes) {
  std::vector<std::size_t> counts(classes, 0);
  for (std::size_t y : data.labels) {
    if (y >= classes) {
      throw InvalidArgument("label " + std::to_string(y) +
                            " out of range for " + std::to_string(classes) +
                            " classes");
    }
    ++counts[y];
  }
  return counts;
}

Matrix MatrixFromJson(const json& j, const char* name, const std::string& source) {
  if (!j.is_array()) throw ParseError(source, 0, std::string(name) + " must be an array of rows");
  Matrix m;
  m.rows = j.size();
  m.cols = m.rows ? j[0].size() : 0;
  m.data.reserve(m.rows * m.cols);
  for (std::size_t r = 0; r < m.rows; ++r) {
    if (!j[r].is_array() || j[r].size() != m.cols) {
      throw ShapeMismatch(source + ": " + name + " row " + std::to_string(r) +
                          " has inconsistent length");
    }
    for (const auto& v : j[r]) {
      if (!v.is_number()) {
        throw ParseError(source, 0, std::string(name) + " holds a non-number");
      }
      m.data.push_back(v.get<double>());
    }
  }
  return m;
}

std::vector<double> VectorFromJson(const json& j, const char* name,
                                   const std::string& source) {
  if (!j.is_array()) throw ParseError(source, 0, std::string(name) + " must be an array");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) {
      throw ParseError(source, 0, std::string(name) + " holds a non-number");
    }
    v.push_back(x.get<double>());
  }
  return v;
}

json MatrixToJson(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

}  // namespace

std::string ActivationName(Activation a) {
  switch (a) {
    case Activation::kRelu:
      return "relu";
    case Activation::kTanh:
      return "tanh";
    case Activation::kSigmoid:
      return "sigmoid";
  }
  return "relu";
}

Activation ParseActivation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "sigmoid") return Activation::kSigmoid;
  throw InvalidArgument("unknown activation '" + name + "'");
}

void MlpModel::Validate() const {
  if (hidden() == 0 || input() == 0 || classes() == 0) {
    throw ShapeMismatch("model dimensions must be positive");
  }
  if (w1.data.size() != w1.rows * w1.cols || w2.data.size() != w2.rows * w2.cols) {
    throw ShapeMismatch("matrix storage does not match its dimensions");
  }
  if (b1.size() != hidden()) {
    throw ShapeMismatch("b1 has " + std::to_string(b1.size()) +
                        " entries, hidden count is " + std::to_string(hidden()));
  }
  if (w2.cols != hidden()) {
    throw ShapeMismatch("w2 has " + std::to_string(w2.cols) +
                        " columns, hidden count is " + std::to_string(hidden()));
  }
  if (b2.size() != classes()) {
    throw ShapeMismatch("b2 has " + std::to_string(b2.size()) +
                        " entries, class count is " + std::to_string(classes()));
  }
  CheckFinite(w1.data, "w1");
  CheckFinite(b1, "b1");
  CheckFinite(w2.data, "w2");
  CheckFinite(b2, "b2");
}

std::vector<double> HiddenActivations(const MlpModel& model,
                                      std::span<const double> x) {
  if (x.size() != model.input()) {
    throw ShapeMismatch("input has " + std::to_string(x.size()) +
                        " features, model expects " +
                        std::to_string(model.input()));
  }
  std::vector<double> a(model.hidden());
  for (std::size_t j = 0; j < model.hidden(); ++j) {
    auto w = model.w1.row(j);
    double z = model.b1[j];
    for (std::size_t i = 0; i < x.size(); ++i) z += w[i] * x[i];
    a[j] = Activate(model.activation, z);
  }
  return a;
}

std::vector<double> ForwardMasked(const MlpModel& model,
                                  std::span<const double> x,
                                  const Coalition& mask) {
  const std::vector<char> intact = MaskFlags(mask, model.hidden());
  const std::vector<double> hidden = HiddenActivations(model, x);
  std::vector<double> scores(model.classes());
  OutputLayer(model, hidden, intact, scores);
  return scores;
}

std::size_t Argmax(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return best;
}

ClasswiseAccuracy EvaluateAccuracy(const MlpModel& model,
                                   const LabeledDataset& data,
                                   const Coalition& mask) {
  if (data.features.cols != model.input()) {
    throw ShapeMismatch("dataset has " + std::to_string(data.features.cols) +
                        " features, model expects " +
                        std::to_string(model.input()));
  }
  if (data.size() == 0) throw InvalidArgument("dataset is empty");
  const std::vector<std::size_t> counts = ClassCounts(data, model.classes());
  const std::vector<char> intact = MaskFlags(mask, model.hidden());
  std::vector<std::size_t> correct(model.classes(), 0);
  std::vector<double> scores(model.classes());
  for (std::size_t s = 0; s < data.size(); ++s) {
    const std::vector<double> hidden =
        HiddenActivations(model, data.features.row(s));
    OutputLayer(model, hidden, intact, scores);
    if (Argmax(scores) == data.labels[s]) ++correct[data.labels[s]];
  }
  ClasswiseAccuracy acc;
  std::size_t total = 0;
  for (std::size_t c = 0; c < model.classes(); ++c) {
    acc.per_class.push_back(
        counts[c] ? static_cast<double>(correct[c]) / static_cast<double>(counts[c])
                  : 0.0);
    total += correct[c];
  }
  acc.overall = static_cast<double>(total) / static_cast<double>(data.size());
  return acc;
}

// --- AccuracyGame ------------------------------------------------------------

AccuracyGame::AccuracyGame(std::shared_ptr<const MlpModel> model,
                           std::shared_ptr<const LabeledDataset> data)
    : model_(std::move(model)), data_(std::move(data)) {
  if (!model_ || !data_) throw InvalidArgument("accuracy game needs a model and a dataset");
  model_->Validate();
  if (data_->size() == 0) throw InvalidArgument("dataset is empty");
  if (data_->features.cols != model_->input()) {
    throw ShapeMismatch("dataset has " + std::to_string(data_->features.cols) +
                        " features, model expects " +
                        std::to_string(model_->input()));
  }
  counts_ = ClassCounts(*data_, model_->classes());
  for (std::size_t c = 0; c < counts_.size(); ++c) {
    if (counts_[c] == 0) {
      throw InvalidArgument("class " + std::to_string(c) +
                            " is absent from the dataset");
    }
  }
  const std::size_t h = model_->hidden();
  activations_.resize(data_->size() * h);
  for (std::size_t s = 0; s < data_->size(); ++s) {
    const std::vector<double> a = HiddenActivations(*model_, data_->features.row(s));
    std::copy(a.begin(), a.end(), activations_.begin() + static_cast<std::ptrdiff_t>(s * h));
  }
}

GameSpec AccuracyGame::spec() const {
  return {model_->hidden(),
          {model_->classes() + 1},
          "mlp-accuracy(hidden=" + std::to_string(model_->hidden()) +
              ",classes=" + std::to_string(model_->classes()) +
              ",samples=" + std::to_string(data_->size()) + ")"};
}

std::vector<std::string> AccuracyGame::player_labels() const {
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < model_->hidden(); ++j) {
    labels.push_back("h" + std::to_string(j));
  }
  return labels;
}

std::vector<std::string> AccuracyGame::element_labels() const {
  std::vector<std::string> labels;
  for (std::size_t c = 0; c < model_->classes(); ++c) {
    labels.push_back("class" + std::to_string(c));
  }
  labels.push_back("overall");
  return labels;
}

ValueTensor AccuracyGame::DoEvaluate(const Coalition& coalition) const {
  const std::size_t h = model_->hidden();
  const std::size_t classes = model_->classes();
  const std::vector<char> intact = MaskFlags(coalition, h);
  std::vector<std::size_t> correct(classes, 0);
  std::vector<double> scores(classes);
  for (std::size_t s = 0; s < data_->size(); ++s) {
    OutputLayer(*model_, std::span<const double>(activations_.data() + s * h, h),
                intact, scores);
    const std::size_t y = data_->labels[s];
    if (Argmax(scores) == y) ++correct[y];
  }
  std::vector<double> out(classes + 1);
  std::size_t total = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    out[c] = static_cast<double>(correct[c]) / static_cast<double>(counts_[c]);
    total += correct[c];
  }
  out[classes] = static_cast<double>(total) / static_cast<double>(data_->size());
  return ValueTensor({classes + 1}, std::move(out));
}

// --- Weight vs importance ----------------------------------------------------

WeightImportanceReport WeightImportanceStats(const MlpModel& model,
                                             const ShapleyResult& result,
                                             std::optional<std::size_t> element) {
  model.Validate();
  const std::size_t h = model.hidden();
  if (result.modes.size() != h) {
    throw ShapeMismatch("result has " + std::to_string(result.modes.size()) +
                        " players, model has " + std::to_string(h) +
                        " hidden neurons");
  }
  if (h < 2) throw InvalidArgument("need at least 2 hidden neurons");
  const std::size_t k = NumElements(result.shape);
  const std::size_t e = element.value_or(k - 1);
  if (e >= k) {
    throw InvalidArgument("element " + std::to_string(e) +
                          " out of range for output of " + std::to_string(k));
  }

  WeightImportanceReport report;
  std::vector<double> weight(h), shapley(h);
  for (std::size_t j = 0; j < h; ++j) {
    double sum = std::abs(model.b1[j]);
    for (double w : model.w1.row(j)) sum += std::abs(w);
    for (std::size_t c = 0; c < model.classes(); ++c) sum += std::abs(model.w2(c, j));
    weight[j] = sum / static_cast<double>(model.input() + model.classes() + 1);
    shapley[j] = result.modes[j].data[e];
    report.neurons.push_back({weight[j], shapley[j]});
  }
  const Correlation corr = Pearson(weight, shapley);
  report.pearson_r = corr.r;
  report.zero_variance = corr.zero_variance;
  return report;
}

// --- File formats ------------------------------------------------------------

MlpModel ParseMlp(std::string_view json_text, const std::string& source) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, 0, e.what());
  }
  for (const char* key : {"input", "hidden", "classes", "w1", "b1", "w2", "b2"}) {
    if (!j.contains(key)) {
      throw ParseError(source, 0, std::string("missing key '") + key + "'");
    }
  }
  MlpModel m;
  m.activation = ParseActivation(j.value("activation", std::string("relu")));
  m.w1 = MatrixFromJson(j["w1"], "w1", source);
  m.b1 = VectorFromJson(j["b1"], "b1", source);
  m.w2 = MatrixFromJson(j["w2"], "w2", source);
  m.b2 = VectorFromJson(j["b2"], "b2", source);
  const auto input = j["input"].get<std::size_t>();
  const auto hidden = j["hidden"].get<std::size_t>();
  const auto classes = j["classes"].get<std::size_t>();
  if (m.w1.rows != hidden || m.w1.cols != input) {
    throw ShapeMismatch(source + ": w1 must be [hidden x input] = [" +
                        std::to_string(hidden) + " x " + std::to_string(input) + "]");
  }
  if (m.w2.rows != classes) {
    throw ShapeMismatch(source + ": w2 must have " + std::to_string(classes) + " rows");
  }
  m.Validate();
  return m;
}

MlpModel LoadMlp(const std::filesystem::path& path) {
  return ParseMlp(internal::ReadFile(path), path.string());
}

void SaveMlp(const MlpModel& model, const std::filesystem::path& path) {
  model.Validate();
  json j;
  j["input"] = model.input();
  j["hidden"] = model.hidden();
  j["classes"] = model.classes();
  j["activation"] = ActivationName(model.activation);
  j["w1"] = MatrixToJson(model.w1);
  j["b1"] = model.b1;
  j["w2"] = MatrixToJson(model.w2);
  j["b2"] = model.b2;
  internal::WriteFile(path, j.dump() + "\n");
}

LabeledDataset ParseDataset(std::string_view csv_text, const std::string& source) {
  const auto rows = internal::SplitCsv(csv_text);
  if (rows.empty()) throw ParseError(source, 0, "empty dataset");
  const auto& header = rows[0].fields;
  if (header.size() < 2 || header.back() != "label") {
    throw ParseError(source, rows[0].line, "header must be 'f0,...,f{d-1},label'");
  }
  const std::size_t d = header.size() - 1;
  LabeledDataset data;
  data.features = Matrix(0, d);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != d + 1) {
      throw ParseError(source, row.line,
                       "expected " + std::to_string(d + 1) + " fields, got " +
                           std::to_string(row.fields.size()));
    }
    for (std::size_t i = 0; i < d; ++i) {
      double v;
      if (!internal::ParseDouble(row.fields[i], &v)) {
        throw ParseError(source, row.line,
                         "non-numeric feature '" + row.fields[i] + "' in column " +
                             header[i]);
      }
      if (!std::isfinite(v)) {
        throw NonFiniteValue(source + ":" + std::to_string(row.line) +
                             ": non-finite feature");
      }
      data.features.data.push_back(v);
    }
    std::size_t y;
    if (!internal::ParseSize(row.fields[d], &y)) {
      throw ParseError(source, row.line, "invalid label '" + row.fields[d] + "'");
    }
    data.labels.push_back(y);
  }
  data.features.rows = data.labels.size();
  return data;
}

LabeledDataset LoadDataset(const std::filesystem::path& path) {
  return ParseDataset(internal::ReadFile(path), path.string());
}

void SaveDataset(const LabeledDataset& data, const std::filesystem::path& path) {
  std::ostringstream out;
  for (std::size_t i = 0; i < data.features.cols; ++i) out << "f" << i << ",";
  out << "label\n";
  for (std::size_t s = 0; s < data.size(); ++s) {
    for (double v : data.features.row(s)) out << internal::FormatDouble(v) << ",";
    out << data.labels[s] << "\n";
  }
  internal::WriteFile(path, out.str());
}

}  // namespace msa
