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

#ifndef MSA_MLP_H_
#define MSA_MLP_H_

// Three-layer perceptron (input -> hidden -> classes) whose hidden neurons
// are the players of an accuracy game.
//
// Lesioning a neuron replaces its post-activation value with exactly 0
// before the output layer. For relu this matches zeroing the pre-activation;
// for tanh and sigmoid it does not, and post-activation is the rule here.

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msa/game.h"
#include "msa/shapley.h"

namespace msa {

enum class Activation { kRelu, kTanh, kSigmoid };

std::string ActivationName(Activation a);
Activation ParseActivation(const std::string& name);

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
  friend bool operator==(const Matrix&, const Matrix&) = default;
};

struct MlpModel {
  Matrix w1;                // [hidden x input]
  std::vector<double> b1;   // [hidden]
  Matrix w2;                // [classes x hidden]
  std::vector<double> b2;   // [classes]
  Activation activation = Activation::kRelu;

  std::size_t input() const { return w1.cols; }
  std::size_t hidden() const { return w1.rows; }
  std::size_t classes() const { return w2.rows; }

  // Throws ShapeMismatch on inconsistent dimensions, NonFiniteValue on NaN/Inf.
  void Validate() const;

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

struct LabeledDataset {
  Matrix features;                  // [samples x input]
  std::vector<std::size_t> labels;  // [samples]

  std::size_t size() const { return labels.size(); }
};

struct ClasswiseAccuracy {
  std::vector<double> per_class;
  double overall = 0.0;
};

// Post-activation hidden values of the unlesioned model.
std::vector<double> HiddenActivations(const MlpModel& model,
                                      std::span<const double> x);

// Class scores with hidden neurons outside `mask` lesioned.
std::vector<double> ForwardMasked(const MlpModel& model,
                                  std::span<const double> x,
                                  const Coalition& mask);

// Index of the largest score; ties go to the lowest index.
std::size_t Argmax(std::span<const double> scores);

ClasswiseAccuracy EvaluateAccuracy(const MlpModel& model,
                                   const LabeledDataset& data,
                                   const Coalition& mask);

// Players are hidden neurons; evaluate(S) returns
// [acc(class 0), ..., acc(class C-1), overall accuracy] under mask S.
// Hidden activations are computed once at construction; the model and
// dataset are immutable, so the game is safe for concurrent evaluation.
class AccuracyGame : public Game {
 public:
  AccuracyGame(std::shared_ptr<const MlpModel> model,
               std::shared_ptr<const LabeledDataset> data);

  GameSpec spec() const override;
  std::vector<std::string> player_labels() const override;
  std::vector<std::string> element_labels() const override;

  std::size_t overall_element() const { return model_->classes(); }
  const std::vector<std::size_t>& class_counts() const { return counts_; }

 protected:
  ValueTensor DoEvaluate(const Coalition& coalition) const override;

 private:
  std::shared_ptr<const MlpModel> model_;
  std::shared_ptr<const LabeledDataset> data_;
  std::vector<double> activations_;  // [samples x hidden]
  std::vector<std::size_t> counts_;  // samples per class
};

struct NeuronImportance {
  double mean_abs_weight = 0.0;
  double shapley = 0.0;
};

struct WeightImportanceReport {
  std::vector<NeuronImportance> neurons;
  double pearson_r = 0.0;
  bool zero_variance = false;
};

// Mean absolute weight of each hidden neuron (its w1 row, its w2 column and
// its bias b1) against its Shapley value for `element` of `result`, plus the
// Pearson correlation across neurons. `element` defaults to the last output
// element, which is overall accuracy for AccuracyGame results.
WeightImportanceReport WeightImportanceStats(
    const MlpModel& model, const ShapleyResult& result,
    std::optional<std::size_t> element = std::nullopt);

// MLP weight file (JSON):
// {input, hidden, classes, activation, w1:[[..]], b1:[..], w2:[[..]], b2:[..]}
MlpModel LoadMlp(const std::filesystem::path& path);
MlpModel ParseMlp(std::string_view json_text,
                  const std::string& source = "<memory>");
void SaveMlp(const MlpModel& model, const std::filesystem::path& path);

// Dataset CSV with header `f0,...,f{d-1},label`.
LabeledDataset LoadDataset(const std::filesystem::path& path);
LabeledDataset ParseDataset(std::string_view csv_text,
                            const std::string& source = "<memory>");
void SaveDataset(const LabeledDataset& data, const std::filesystem::path& path);

}  // namespace msa

#endif  // MSA_MLP_H_
