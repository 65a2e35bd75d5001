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

#include "msa/game.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>

#include "csv_util.h"
#include "msa/errors.h"

namespace msa {

std::size_t NumElements(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

ValueTensor::ValueTensor(Shape s, std::vector<double> d)
    : shape(std::move(s)), data(std::move(d)) {
  if (NumElements(shape) != data.size()) {
    throw ShapeMismatch("tensor of shape " + ShapeToString(shape) + " needs " +
                        std::to_string(NumElements(shape)) +
                        " elements, got " + std::to_string(data.size()));
  }
}

ValueTensor ValueTensor::Zeros(const Shape& s) {
  return ValueTensor(s, std::vector<double>(NumElements(s), 0.0));
}

bool ValueTensor::AllFinite() const {
  return std::all_of(data.begin(), data.end(),
                     [](double v) { return std::isfinite(v); });
}

ValueTensor Subtract(const ValueTensor& a, const ValueTensor& b) {
  if (a.shape != b.shape) {
    throw ShapeMismatch("cannot subtract " + ShapeToString(b.shape) +
                        " from " + ShapeToString(a.shape));
  }
  ValueTensor out = a;
  for (std::size_t k = 0; k < out.data.size(); ++k) out.data[k] -= b.data[k];
  return out;
}

// --- Coalition ---------------------------------------------------------------

Coalition::Coalition(std::size_t width)
    : width_(width), words_((width + 63) / 64, 0) {}

Coalition Coalition::Grand(std::size_t width) {
  Coalition c(width);
  for (std::size_t w = 0; w < c.words_.size(); ++w) c.words_[w] = ~0ULL;
  if (width % 64 != 0) c.words_.back() = (1ULL << (width % 64)) - 1;
  return c;
}

Coalition Coalition::FromIndices(std::size_t width,
                                 std::span<const std::size_t> players) {
  Coalition c(width);
  for (std::size_t p : players) c.Add(p);
  return c;
}

Coalition Coalition::FromBitstring(std::string_view bits) {
  Coalition c(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      c.Add(i);
    } else if (bits[i] != '0') {
      throw InvalidArgument("invalid coalition bitstring '" +
                            std::string(bits) + "'");
    }
  }
  return c;
}

Coalition Coalition::FromMask(std::size_t width, std::uint64_t mask) {
  if (width > 64) throw InvalidArgument("FromMask needs width <= 64");
  if (width < 64 && (mask >> width) != 0) {
    throw InvalidArgument("mask has bits beyond coalition width");
  }
  Coalition c(width);
  if (!c.words_.empty()) c.words_[0] = mask;
  return c;
}

void Coalition::CheckPlayer(std::size_t player) const {
  if (player >= width_) {
    throw ShapeMismatch("player " + std::to_string(player) +
                        " out of range for coalition of width " +
                        std::to_string(width_));
  }
}

bool Coalition::Contains(std::size_t player) const {
  CheckPlayer(player);
  return (words_[player / 64] >> (player % 64)) & 1ULL;
}

void Coalition::Add(std::size_t player) {
  CheckPlayer(player);
  words_[player / 64] |= 1ULL << (player % 64);
}

void Coalition::Remove(std::size_t player) {
  CheckPlayer(player);
  words_[player / 64] &= ~(1ULL << (player % 64));
}

std::size_t Coalition::Count() const {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<std::size_t> Coalition::Members() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < width_; ++i) {
    if ((words_[i / 64] >> (i % 64)) & 1ULL) out.push_back(i);
  }
  return out;
}

std::string Coalition::ToBitstring() const {
  std::string s(width_, '0');
  for (std::size_t i = 0; i < width_; ++i) {
    if ((words_[i / 64] >> (i % 64)) & 1ULL) s[i] = '1';
  }
  return s;
}

std::size_t Coalition::Hash() const {
  // FNV-1a over the words, seeded with the width.
  std::uint64_t h = 1469598103934665603ULL ^ width_;
  for (std::uint64_t w : words_) {
    h ^= w;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

// --- Game --------------------------------------------------------------------

std::vector<std::string> Game::player_labels() const {
  std::vector<std::string> labels;
  const std::size_t n = num_players();
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

std::vector<std::string> Game::element_labels() const {
  std::vector<std::string> labels;
  const std::size_t k = NumElements(spec().output_shape);
  labels.reserve(k);
  for (std::size_t i = 0; i < k; ++i) labels.push_back("e" + std::to_string(i));
  return labels;
}

std::unique_ptr<Game> Game::Clone() const {
  throw InvalidArgument("game '" + spec().descriptor + "' is not clonable");
}

ValueTensor Game::Evaluate(const Coalition& coalition) const {
  const GameSpec s = spec();
  if (coalition.width() != s.n_players) {
    throw ShapeMismatch("coalition width " + std::to_string(coalition.width()) +
                        " does not match player count " +
                        std::to_string(s.n_players));
  }
  ValueTensor v = DoEvaluate(coalition);
  if (v.shape != s.output_shape || v.data.size() != NumElements(s.output_shape)) {
    throw ShapeMismatch("game '" + s.descriptor + "' returned shape " +
                        ShapeToString(v.shape) + ", declared " +
                        ShapeToString(s.output_shape));
  }
  if (!v.AllFinite()) {
    throw NonFiniteValue("game '" + s.descriptor +
                         "' produced a non-finite value at coalition " +
                         coalition.ToBitstring());
  }
  return v;
}

// --- Reference games ---------------------------------------------------------

AdditiveGame::AdditiveGame(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) throw InvalidArgument("additive game needs weights");
  for (double w : weights_) {
    if (!std::isfinite(w)) throw InvalidArgument("additive weight not finite");
  }
}

GameSpec AdditiveGame::spec() const {
  std::ostringstream d;
  d << "additive(w=";
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    d << (i ? "," : "") << internal::FormatDouble(weights_[i]);
  }
  d << ")";
  return {weights_.size(), {}, d.str()};
}

ValueTensor AdditiveGame::DoEvaluate(const Coalition& coalition) const {
  double total = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (coalition.Contains(i)) total += weights_[i];
  }
  return ValueTensor::Scalar(total);
}

MajorityGame::MajorityGame(std::size_t n_players, std::size_t quota)
    : n_(n_players), quota_(quota) {
  if (n_ == 0) throw InvalidArgument("majority game needs at least 1 player");
  if (quota_ > n_) {
    throw InvalidArgument("majority quota " + std::to_string(quota_) +
                          " exceeds player count " + std::to_string(n_));
  }
}

GameSpec MajorityGame::spec() const {
  return {n_, {}, "majority(n=" + std::to_string(n_) +
                      ",quota=" + std::to_string(quota_) + ")"};
}

ValueTensor MajorityGame::DoEvaluate(const Coalition& coalition) const {
  return ValueTensor::Scalar(coalition.Count() >= quota_ ? 1.0 : 0.0);
}

GloveGame::GloveGame(std::vector<std::size_t> left,
                     std::vector<std::size_t> right)
    : left_(std::move(left)), right_(std::move(right)) {
  const std::size_t n = left_.size() + right_.size();
  if (left_.empty() || right_.empty()) {
    throw InvalidArgument("glove game needs non-empty left and right sets");
  }
  std::vector<int> seen(n, 0);
  is_left_.assign(n, false);
  for (std::size_t p : left_) {
    if (p >= n || seen[p]++) {
      throw InvalidArgument("glove sets must partition players 0..n-1");
    }
    is_left_[p] = true;
  }
  for (std::size_t p : right_) {
    if (p >= n || seen[p]++) {
      throw InvalidArgument("glove sets must partition players 0..n-1");
    }
  }
}

GameSpec GloveGame::spec() const {
  auto join = [](const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      s += (i ? "," : "") + std::to_string(v[i]);
    }
    return s;
  };
  return {is_left_.size(), {},
          "glove(left={" + join(left_) + "},right={" + join(right_) + "})"};
}

ValueTensor GloveGame::DoEvaluate(const Coalition& coalition) const {
  std::size_t l = 0, r = 0;
  for (std::size_t i = 0; i < is_left_.size(); ++i) {
    if (coalition.Contains(i)) (is_left_[i] ? l : r)++;
  }
  return ValueTensor::Scalar(static_cast<double>(std::min(l, r)));
}

ReferenceGameKind ReferenceGameKind::Additive(std::vector<double> w) {
  ReferenceGameKind k;
  k.tag = Tag::kAdditive;
  k.weights = std::move(w);
  return k;
}

ReferenceGameKind ReferenceGameKind::Majority(std::size_t n, std::size_t quota) {
  ReferenceGameKind k;
  k.tag = Tag::kMajority;
  k.n_players = n;
  k.quota = quota;
  return k;
}

ReferenceGameKind ReferenceGameKind::Glove(std::vector<std::size_t> left,
                                           std::vector<std::size_t> right) {
  ReferenceGameKind k;
  k.tag = Tag::kGlove;
  k.left = std::move(left);
  k.right = std::move(right);
  return k;
}

std::unique_ptr<Game> MakeReferenceGame(const ReferenceGameKind& kind) {
  switch (kind.tag) {
    case ReferenceGameKind::Tag::kAdditive:
      return std::make_unique<AdditiveGame>(kind.weights);
    case ReferenceGameKind::Tag::kMajority:
      return std::make_unique<MajorityGame>(kind.n_players, kind.quota);
    case ReferenceGameKind::Tag::kGlove:
      return std::make_unique<GloveGame>(kind.left, kind.right);
  }
  throw InvalidArgument("unknown reference game kind");
}

// --- Tabular games -----------------------------------------------------------

TabularGame::TabularGame(std::size_t n_players, Shape output_shape)
    : n_(n_players), shape_(std::move(output_shape)) {
  if (n_ == 0) throw InvalidArgument("tabular game needs at least 1 player");
}

void TabularGame::Set(const Coalition& coalition, ValueTensor value) {
  if (coalition.width() != n_) {
    throw ShapeMismatch("coalition width " + std::to_string(coalition.width()) +
                        " does not match player count " + std::to_string(n_));
  }
  if (value.shape != shape_) {
    throw ShapeMismatch("table value shape " + ShapeToString(value.shape) +
                        " does not match " + ShapeToString(shape_));
  }
  if (!value.AllFinite()) {
    throw NonFiniteValue("non-finite table value at coalition " +
                         coalition.ToBitstring());
  }
  table_[coalition] = std::move(value);
}

bool TabularGame::Has(const Coalition& coalition) const {
  return table_.contains(coalition);
}

bool TabularGame::complete() const {
  return n_ < 64 && table_.size() == (std::size_t{1} << n_);
}

GameSpec TabularGame::spec() const {
  return {n_, shape_, "tabular(n=" + std::to_string(n_) + ",entries=" +
                          std::to_string(table_.size()) + ")"};
}

ValueTensor TabularGame::DoEvaluate(const Coalition& coalition) const {
  auto it = table_.find(coalition);
  if (it == table_.end()) {
    throw MissingEntry("coalition " + coalition.ToBitstring() +
                       " not present in table");
  }
  return it->second;
}

TabularGame TabularGame::Sum(const TabularGame& a, const TabularGame& b) {
  if (a.n_ != b.n_ || a.shape_ != b.shape_) {
    throw ShapeMismatch("cannot add tabular games of different signature");
  }
  if (a.table_.size() != b.table_.size()) {
    throw MissingEntry("tabular games hold different coalitions");
  }
  TabularGame out(a.n_, a.shape_);
  for (const auto& [coalition, va] : a.table_) {
    auto it = b.table_.find(coalition);
    if (it == b.table_.end()) {
      throw MissingEntry("coalition " + coalition.ToBitstring() +
                         " missing from second game");
    }
    ValueTensor v = va;
    for (std::size_t k = 0; k < v.data.size(); ++k) v.data[k] += it->second.data[k];
    out.table_.emplace(coalition, std::move(v));
  }
  return out;
}

TabularGame ParseTabularGame(std::string_view text, const std::string& source) {
  const auto rows = internal::SplitCsv(text);
  if (rows.empty()) throw ParseError(source, 0, "empty coalition table");
  const auto& header = rows[0].fields;
  if (header.size() < 2 || header[0] != "coalition") {
    throw ParseError(source, rows[0].line,
                     "header must be 'coalition,v0[,v1,...]'");
  }
  const std::size_t k = header.size() - 1;
  if (rows.size() < 2) throw ParseError(source, 0, "table has no rows");
  const std::size_t n = rows[1].fields.empty() ? 0 : rows[1].fields[0].size();
  if (n == 0) throw ParseError(source, rows[1].line, "empty coalition field");

  TabularGame game(n, k == 1 ? Shape{} : Shape{k});
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != k + 1) {
      throw ParseError(source, row.line,
                       "expected " + std::to_string(k) + " value(s), got " +
                           std::to_string(row.fields.size() - 1));
    }
    const std::string& bits = row.fields[0];
    if (bits.size() != n ||
        bits.find_first_not_of("01") != std::string::npos) {
      throw ParseError(source, row.line,
                       "coalition must be a bitstring of length " +
                           std::to_string(n));
    }
    Coalition c = Coalition::FromBitstring(bits);
    if (game.Has(c)) {
      throw ParseError(source, row.line, "duplicate coalition " + bits);
    }
    std::vector<double> values(k);
    for (std::size_t j = 0; j < k; ++j) {
      if (!internal::ParseDouble(row.fields[j + 1], &values[j])) {
        throw ParseError(source, row.line,
                         "invalid number '" + row.fields[j + 1] + "'");
      }
      if (!std::isfinite(values[j])) {
        throw NonFiniteValue(source + ":" + std::to_string(row.line) +
                             ": non-finite value '" + row.fields[j + 1] + "'");
      }
    }
    game.Set(c, ValueTensor(k == 1 ? Shape{} : Shape{k}, std::move(values)));
  }
  return game;
}

TabularGame LoadTabularGame(const std::filesystem::path& path) {
  return ParseTabularGame(internal::ReadFile(path), path.string());
}

void SaveTabularGame(const TabularGame& game,
                     const std::filesystem::path& path) {
  const GameSpec s = game.spec();
  const std::size_t k = NumElements(s.output_shape);
  if (!s.output_shape.empty() && s.output_shape.size() != 1) {
    throw ShapeMismatch("coalition table files hold shape [] or [k] only");
  }
  std::ostringstream out;
  out << "coalition";
  for (std::size_t j = 0; j < k; ++j) out << ",v" << j;
  out << "\n";
  // Rows are emitted in bitstring order so files are reproducible.
  std::map<std::string, const ValueTensor*> sorted;
  for (const auto& [c, v] : game.table_) sorted.emplace(c.ToBitstring(), &v);
  for (const auto& [bits, v] : sorted) {
    out << bits;
    for (double x : v->data) out << "," << internal::FormatDouble(x);
    out << "\n";
  }
  internal::WriteFile(path, out.str());
}

}  // namespace msa
