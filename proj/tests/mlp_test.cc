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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "msa/errors.h"
#include "msa/shapley.h"
#include "oracle.h"

namespace msa {
namespace {

Matrix Mat(std::size_t r, std::size_t c, std::vector<double> v) {
  Matrix m(r, c);
  m.data = std::move(v);
  return m;
}

MlpModel RandomModel(std::size_t in, std::size_t hidden, std::size_t classes,
                     Activation act, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  MlpModel m;
  m.w1 = Matrix(hidden, in);
  m.w2 = Matrix(classes, hidden);
  for (double& x : m.w1.data) x = n(rng);
  for (double& x : m.w2.data) x = n(rng);
  m.b1.resize(hidden);
  m.b2.resize(classes);
  for (double& x : m.b1) x = n(rng);
  for (double& x : m.b2) x = n(rng);
  m.activation = act;
  return m;
}

LabeledDataset RandomData(std::size_t samples, std::size_t in, std::size_t classes,
                          std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  LabeledDataset d;
  d.features = Matrix(samples, in);
  for (double& x : d.features.data) x = n(rng);
  for (std::size_t s = 0; s < samples; ++s) d.labels.push_back(s % classes);
  return d;
}

// Hidden neuron 0 = relu(x) pushes towards class 1; neuron 1 is a constant
// bias towards class 0.
MlpModel Separator() {
  MlpModel m;
  m.w1 = Mat(2, 1, {1.0, 0.0});
  m.b1 = {0.0, 1.0};
  m.w2 = Mat(2, 2, {-1.0, 0.1, 1.0, 0.0});
  m.b2 = {0.0, 0.0};
  return m;
}

LabeledDataset SeparatorData() {
  LabeledDataset d;
  d.features = Mat(4, 1, {-1.0, -2.0, -0.5, 1.0});
  d.labels = {0, 0, 0, 1};
  return d;
}

TEST(ForwardTest, EmptyMaskGivesOutputBias) {
  std::mt19937_64 rng(1);
  for (Activation act : {Activation::kRelu, Activation::kTanh, Activation::kSigmoid}) {
    const MlpModel m = RandomModel(5, 7, 3, act, rng);
    const std::vector<double> x = {0.3, -1.0, 2.0, 0.0, 0.5};
    EXPECT_EQ(ForwardMasked(m, x, Coalition(7)), m.b2);
  }
}

TEST(ForwardTest, FullMaskIsPlainForwardPass) {
  std::mt19937_64 rng(2);
  const MlpModel m = RandomModel(4, 6, 3, Activation::kTanh, rng);
  const std::vector<double> x = {0.1, 0.2, -0.3, 0.4};
  const std::vector<double> out = ForwardMasked(m, x, Coalition::Grand(6));
  for (std::size_t c = 0; c < 3; ++c) {
    double z = m.b2[c];
    for (std::size_t j = 0; j < 6; ++j) {
      double pre = m.b1[j];
      for (std::size_t i = 0; i < 4; ++i) pre += m.w1(j, i) * x[i];
      z += m.w2(c, j) * std::tanh(pre);
    }
    EXPECT_NEAR(out[c], z, 1e-12);
  }
}

TEST(ForwardTest, SingleNeuronLesionShift) {
  MlpModel m;
  m.w1 = Mat(1, 1, {1.5});
  m.b1 = {-1.0};
  m.w2 = Mat(2, 1, {0.5, -3.0});
  m.b2 = {0.1, 0.2};
  const std::vector<double> x = {2.0};
  const auto full = ForwardMasked(m, x, Coalition::Grand(1));
  const auto lesioned = ForwardMasked(m, x, Coalition(1));
  // a = relu(1.5 * 2 - 1) = 2
  EXPECT_NEAR(full[0], 1.1, 1e-15);
  EXPECT_NEAR(full[1], -5.8, 1e-15);
  EXPECT_NEAR(lesioned[0] - full[0], -2.0 * 0.5, 1e-15);
  EXPECT_NEAR(lesioned[1] - full[1], -2.0 * -3.0, 1e-15);
}

TEST(ForwardTest, SigmoidLesionZeroesPostActivation) {
  MlpModel m;
  m.w1 = Mat(1, 1, {0.0});
  m.b1 = {0.0};
  m.w2 = Mat(1, 1, {2.0});
  m.b2 = {0.0};
  m.activation = Activation::kSigmoid;
  const std::vector<double> x = {1.0};
  EXPECT_NEAR(ForwardMasked(m, x, Coalition::Grand(1))[0], 1.0, 1e-15);
  EXPECT_EQ(ForwardMasked(m, x, Coalition(1))[0], 0.0);
}

TEST(ForwardTest, MaskWidthChecked) {
  std::mt19937_64 rng(3);
  const MlpModel m = RandomModel(2, 3, 2, Activation::kRelu, rng);
  const std::vector<double> x = {1.0, 1.0};
  EXPECT_THROW(ForwardMasked(m, x, Coalition(4)), ShapeMismatch);
  const std::vector<double> short_x = {1.0};
  EXPECT_THROW(ForwardMasked(m, short_x, Coalition(3)), ShapeMismatch);
}

TEST(ForwardTest, LesionLocality) {
  std::mt19937_64 rng(4);
  MlpModel m = RandomModel(3, 5, 4, Activation::kTanh, rng);
  for (std::size_t c = 0; c < 4; ++c) m.w2(c, 2) = 0.0;
  const std::vector<double> x = {0.7, -0.2, 1.1};
  Coalition without(5);
  for (std::size_t j : {0, 1, 3, 4}) without.Add(j);
  EXPECT_EQ(ForwardMasked(m, x, Coalition::Grand(5)), ForwardMasked(m, x, without));
}

TEST(ArgmaxTest, TiesGoToLowestIndex) {
  const std::vector<double> s = {1.0, 3.0, 3.0, 2.0};
  EXPECT_EQ(Argmax(s), 1u);
}

TEST(AccuracyGameTest, GrandAndEmptyCoalitions) {
  auto model = std::make_shared<const MlpModel>(Separator());
  auto data = std::make_shared<const LabeledDataset>(SeparatorData());
  const AccuracyGame g(model, data);
  EXPECT_EQ(g.spec().output_shape, Shape{3});
  EXPECT_EQ(g.Evaluate(Coalition::Grand(2)).data, (std::vector<double>{1.0, 1.0, 1.0}));
  // Empty coalition: scores = b2 = (0, 0), ties go to class 0.
  EXPECT_EQ(g.Evaluate(Coalition(2)).data, (std::vector<double>{1.0, 0.0, 0.75}));
  EXPECT_EQ(g.element_labels(), (std::vector<std::string>{"class0", "class1", "overall"}));
  EXPECT_EQ(g.player_labels(), (std::vector<std::string>{"h0", "h1"}));
}

TEST(AccuracyGameTest, LesioningSeparatorGivesMajorityRate) {
  auto model = std::make_shared<const MlpModel>(Separator());
  auto data = std::make_shared<const LabeledDataset>(SeparatorData());
  const AccuracyGame g(model, data);
  const ValueTensor v = g.Evaluate(Coalition::FromBitstring("01"));
  EXPECT_EQ(v[2], 0.75);
  EXPECT_EQ(v[0], 1.0);
  EXPECT_EQ(v[1], 0.0);
}

TEST(AccuracyGameTest, MissingClassRejected) {
  auto model = std::make_shared<const MlpModel>(Separator());
  LabeledDataset d = SeparatorData();
  d.labels = {0, 0, 0, 0};
  EXPECT_THROW(AccuracyGame(model, std::make_shared<const LabeledDataset>(d)),
               InvalidArgument);
}

TEST(AccuracyGameTest, MatchesDirectEvaluation) {
  std::mt19937_64 rng(5);
  auto model = std::make_shared<const MlpModel>(RandomModel(4, 6, 3, Activation::kRelu, rng));
  auto data = std::make_shared<const LabeledDataset>(RandomData(60, 4, 3, rng));
  const AccuracyGame g(model, data);
  for (std::uint64_t mask = 0; mask < 64; ++mask) {
    const Coalition c = Coalition::FromMask(6, mask);
    const ValueTensor v = g.Evaluate(c);
    std::vector<double> hits(3, 0.0);
    double total = 0.0;
    for (std::size_t s = 0; s < data->size(); ++s) {
      const bool ok = Argmax(ForwardMasked(*model, data->features.row(s), c)) == data->labels[s];
      hits[data->labels[s]] += ok;
      total += ok;
    }
    for (std::size_t k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(v[k], hits[k] / 20.0);
    EXPECT_DOUBLE_EQ(v[3], total / 60.0);
    for (double x : v.data) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
  }
}

TEST(AccuracyGameTest, EfficiencyAndClassConsistency) {
  std::mt19937_64 rng(6);
  auto model = std::make_shared<const MlpModel>(RandomModel(5, 8, 3, Activation::kRelu, rng));
  LabeledDataset d = RandomData(90, 5, 3, rng);
  d.labels[0] = 1;  // unequal class sizes: 29, 31, 30
  auto data = std::make_shared<const LabeledDataset>(d);
  const AccuracyGame g(model, data);
  SamplingPlan sampled;
  sampled.mode = SamplingMode::kMonteCarlo;
  sampled.n_permutations = 300;
  for (const ShapleyResult& r : {ShapleyExact(g), ShapleySampled(g, sampled)}) {
    double sum = 0.0;
    for (const auto& m : r.modes) sum += m[3];
    EXPECT_NEAR(sum, r.grand_value[3] - r.empty_value[3], 1e-9);
    for (const auto& m : r.modes) {
      double weighted = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        weighted += m[k] * static_cast<double>(g.class_counts()[k]) / 90.0;
      }
      EXPECT_NEAR(weighted, m[3], 1e-9);
    }
  }
}

ShapleyResult ResultWithOverall(const std::vector<double>& overall, std::size_t classes) {
  ShapleyResult r;
  r.shape = {classes + 1};
  for (double v : overall) {
    ValueTensor t = ValueTensor::Zeros(r.shape);
    t[classes] = v;
    r.modes.push_back(t);
  }
  return r;
}

TEST(WeightImportanceTest, MeanAbsWeightDefinition) {
  MlpModel m;
  m.w1 = Mat(2, 2, {1.0, -2.0, 0.5, 0.5});
  m.b1 = {-3.0, 1.0};
  m.w2 = Mat(1, 2, {4.0, -1.0});
  m.b2 = {0.0};
  const auto rep = WeightImportanceStats(m, ResultWithOverall({1.0, 2.0}, 1));
  EXPECT_NEAR(rep.neurons[0].mean_abs_weight, (1 + 2 + 4 + 3) / 4.0, 1e-15);
  EXPECT_NEAR(rep.neurons[1].mean_abs_weight, (0.5 + 0.5 + 1 + 1) / 4.0, 1e-15);
  EXPECT_EQ(rep.neurons[1].shapley, 2.0);
}

TEST(WeightImportanceTest, AffineGivesOne) {
  std::mt19937_64 rng(7);
  const MlpModel m = RandomModel(3, 6, 2, Activation::kRelu, rng);
  const auto base = WeightImportanceStats(m, ResultWithOverall(std::vector<double>(6, 0.0), 2));
  std::vector<double> affine;
  for (const auto& n : base.neurons) affine.push_back(3.0 * n.mean_abs_weight - 0.2);
  const auto rep = WeightImportanceStats(m, ResultWithOverall(affine, 2));
  EXPECT_NEAR(rep.pearson_r, 1.0, 1e-12);
  EXPECT_FALSE(rep.zero_variance);
}

TEST(WeightImportanceTest, DecreasingGivesMinusOne) {
  MlpModel m;
  m.w1 = Mat(4, 1, {1, 2, 3, 4});
  m.b1 = {0, 0, 0, 0};
  m.w2 = Mat(1, 4, {0, 0, 0, 0});
  m.b2 = {0};
  const auto rep = WeightImportanceStats(m, ResultWithOverall({4, 3, 2, 1}, 1));
  EXPECT_NEAR(rep.pearson_r, -1.0, 1e-12);
}

TEST(WeightImportanceTest, ConstantWeightsFlagged) {
  MlpModel m;
  m.w1 = Mat(3, 1, {1, 1, 1});
  m.b1 = {0, 0, 0};
  m.w2 = Mat(1, 3, {1, 1, 1});
  m.b2 = {0};
  const auto rep = WeightImportanceStats(m, ResultWithOverall({0.1, 0.5, 0.2}, 1));
  EXPECT_TRUE(rep.zero_variance);
  EXPECT_EQ(rep.pearson_r, 0.0);
}

TEST(MlpIoTest, SaveLoadRoundTrip) {
  std::mt19937_64 rng(8);
  const MlpModel m = RandomModel(3, 4, 2, Activation::kSigmoid, rng);
  const LabeledDataset d = RandomData(10, 3, 2, rng);
  const auto dir = oracle::FreshDir("mlp_io");
  SaveMlp(m, dir / "m.json");
  SaveDataset(d, dir / "d.csv");
  const MlpModel m2 = LoadMlp(dir / "m.json");
  const LabeledDataset d2 = LoadDataset(dir / "d.csv");
  EXPECT_EQ(m2, m);
  EXPECT_EQ(d2.features, d.features);
  EXPECT_EQ(d2.labels, d.labels);
  for (std::size_t s = 0; s < d.size(); ++s) {
    EXPECT_EQ(ForwardMasked(m2, d2.features.row(s), Coalition::Grand(4)),
              ForwardMasked(m, d.features.row(s), Coalition::Grand(4)));
  }
}

TEST(MlpIoTest, DimensionErrors) {
  const std::string ok =
      R"({"input":1,"hidden":2,"classes":1,"activation":"relu",)"
      R"("w1":[[1],[2]],"b1":[0,0],"w2":[[1,1]],"b2":[0]})";
  EXPECT_NO_THROW(ParseMlp(ok));
  const std::string bad_w2 =
      R"({"input":1,"hidden":2,"classes":1,"activation":"relu",)"
      R"("w1":[[1],[2]],"b1":[0,0],"w2":[[1,1,1]],"b2":[0]})";
  EXPECT_THROW(ParseMlp(bad_w2), ShapeMismatch);
  const std::string bad_act =
      R"({"input":1,"hidden":2,"classes":1,"activation":"gelu",)"
      R"("w1":[[1],[2]],"b1":[0,0],"w2":[[1,1]],"b2":[0]})";
  EXPECT_THROW(ParseMlp(bad_act), Error);
  EXPECT_THROW(ParseMlp("{not json"), ParseError);
}

TEST(MlpIoTest, DatasetParseErrorHasRowNumber) {
  try {
    ParseDataset("f0,f1,label\n1,2,0\n3,x,1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(ParseDataset("a,b\n1,0\n"), ParseError);
}

TEST(MlpIoTest, BundledDeskModelLoads) {
  const MlpModel m = LoadMlp(MSA_DATA_DIR "/desk_model.json");
  const LabeledDataset d = LoadDataset(MSA_DATA_DIR "/desk_blobs.csv");
  EXPECT_EQ(m.input(), 64u);
  EXPECT_EQ(m.hidden(), 32u);
  EXPECT_EQ(m.classes(), 4u);
  EXPECT_EQ(d.size(), 400u);
  const AccuracyGame g(std::make_shared<const MlpModel>(m),
                       std::make_shared<const LabeledDataset>(d));
  EXPECT_GT(g.Evaluate(Coalition::Grand(32))[4], 0.9);
}

}  // namespace
}  // namespace msa
