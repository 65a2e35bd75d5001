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

#ifndef MSA_GAME_H_
#define MSA_GAME_H_

// Players, coalitions, value tensors and the game contract.
//
// A game maps a coalition (the set of intact players) to a ValueTensor of a
// fixed shape. Perturbing a player means clearing its bit, so the grand
// coalition is the unlesioned model and the empty coalition is the fully
// lesioned one. V(empty) is whatever the game returns; nothing forces it to
// zero.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace msa {

using Shape = std::vector<std::size_t>;

// Number of elements of a tensor with the given extents. 1 for shape [].
std::size_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

// Shaped block of finite doubles, row-major. Scalars have shape [].
struct ValueTensor {
  Shape shape;
  std::vector<double> data;

  ValueTensor() : data(1, 0.0) {}
  ValueTensor(Shape s, std::vector<double> d);

  static ValueTensor Scalar(double v) { return ValueTensor({}, {v}); }
  static ValueTensor Zeros(const Shape& s);

  std::size_t size() const { return data.size(); }
  bool is_scalar() const { return shape.empty(); }
  double operator[](std::size_t i) const { return data[i]; }
  double& operator[](std::size_t i) { return data[i]; }
  bool AllFinite() const;

  // Bitwise equality of shape and data.
  friend bool operator==(const ValueTensor& a, const ValueTensor& b) = default;
};

// Element-wise a - b. Shapes must agree.
ValueTensor Subtract(const ValueTensor& a, const ValueTensor& b);

// Fixed-width set of players. Bit i set <=> player i is intact.
class Coalition {
 public:
  Coalition() = default;
  explicit Coalition(std::size_t width);

  static Coalition Empty(std::size_t width) { return Coalition(width); }
  static Coalition Grand(std::size_t width);
  static Coalition FromIndices(std::size_t width,
                               std::span<const std::size_t> players);
  // Big-endian bitstring: leftmost character is player 0.
  static Coalition FromBitstring(std::string_view bits);
  // Low bit of `mask` is player 0. Requires width <= 64.
  static Coalition FromMask(std::size_t width, std::uint64_t mask);

  std::size_t width() const { return width_; }
  bool Contains(std::size_t player) const;
  void Add(std::size_t player);
  void Remove(std::size_t player);
  std::size_t Count() const;
  std::vector<std::size_t> Members() const;
  std::string ToBitstring() const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::size_t Hash() const;

  friend bool operator==(const Coalition& a, const Coalition& b) = default;

 private:
  void CheckPlayer(std::size_t player) const;

  std::size_t width_ = 0;
  std::vector<std::uint64_t> words_;
};

struct CoalitionHash {
  std::size_t operator()(const Coalition& c) const { return c.Hash(); }
};

// Static description of a game.
struct GameSpec {
  std::size_t n_players = 0;
  Shape output_shape;
  std::string descriptor;  // kind tag plus parameters, e.g. "majority(quota=2)"
};

// The value-function contract. Implementations override DoEvaluate; callers
// go through Evaluate, which enforces width, shape and finiteness.
//
// Games must be pure functions of the coalition. A game that is not safe for
// concurrent evaluation returns true from clone_per_worker() and implements
// Clone(); the engine then gives each worker its own copy.
class Game {
 public:
  virtual ~Game() = default;

  virtual GameSpec spec() const = 0;
  std::size_t num_players() const { return spec().n_players; }

  // Per-player labels; defaults to the decimal index.
  virtual std::vector<std::string> player_labels() const;
  // Per-output-element labels; defaults to "e0", "e1", ...
  virtual std::vector<std::string> element_labels() const;

  virtual bool clone_per_worker() const { return false; }
  virtual std::unique_ptr<Game> Clone() const;

  // Throws ShapeMismatch, MissingEntry or NonFiniteValue.
  ValueTensor Evaluate(const Coalition& coalition) const;

 protected:
  virtual ValueTensor DoEvaluate(const Coalition& coalition) const = 0;
};

// v(S) = sum of weights of members of S.
class AdditiveGame : public Game {
 public:
  explicit AdditiveGame(std::vector<double> weights);
  GameSpec spec() const override;
  const std::vector<double>& weights() const { return weights_; }

 protected:
  ValueTensor DoEvaluate(const Coalition& coalition) const override;

 private:
  std::vector<double> weights_;
};

// v(S) = 1 if |S| >= quota else 0.
class MajorityGame : public Game {
 public:
  MajorityGame(std::size_t n_players, std::size_t quota);
  GameSpec spec() const override;

 protected:
  ValueTensor DoEvaluate(const Coalition& coalition) const override;

 private:
  std::size_t n_;
  std::size_t quota_;
};

// v(S) = min(|S & left|, |S & right|); left and right partition the players.
class GloveGame : public Game {
 public:
  GloveGame(std::vector<std::size_t> left, std::vector<std::size_t> right);
  GameSpec spec() const override;

 protected:
  ValueTensor DoEvaluate(const Coalition& coalition) const override;

 private:
  std::vector<std::size_t> left_;
  std::vector<std::size_t> right_;
  std::vector<bool> is_left_;
};

// Explicit Coalition -> ValueTensor table. Complete tables hold all 2^n rows;
// querying a partial table at a missing row throws MissingEntry.
class TabularGame : public Game {
 public:
  TabularGame(std::size_t n_players, Shape output_shape);

  void Set(const Coalition& coalition, ValueTensor value);
  bool Has(const Coalition& coalition) const;
  std::size_t num_entries() const { return table_.size(); }
  bool complete() const;

  GameSpec spec() const override;

  // Coalition-wise sum of two games with equal player count and shape.
  // Both must hold exactly the same coalitions.
  static TabularGame Sum(const TabularGame& a, const TabularGame& b);

 protected:
  ValueTensor DoEvaluate(const Coalition& coalition) const override;

 private:
  friend void SaveTabularGame(const TabularGame&, const std::filesystem::path&);

  std::size_t n_;
  Shape shape_;
  std::unordered_map<Coalition, ValueTensor, CoalitionHash> table_;
};

// Parameters of the built-in oracle games.
struct ReferenceGameKind {
  enum class Tag { kAdditive, kMajority, kGlove };
  Tag tag = Tag::kAdditive;
  std::vector<double> weights;     // additive
  std::size_t n_players = 0;       // majority
  std::size_t quota = 0;           // majority
  std::vector<std::size_t> left;   // glove
  std::vector<std::size_t> right;  // glove

  static ReferenceGameKind Additive(std::vector<double> w);
  static ReferenceGameKind Majority(std::size_t n, std::size_t quota);
  static ReferenceGameKind Glove(std::vector<std::size_t> left,
                                 std::vector<std::size_t> right);
};

// Throws InvalidArgument on malformed parameters.
std::unique_ptr<Game> MakeReferenceGame(const ReferenceGameKind& kind);

// Coalition-table CSV: header `coalition,v0[,v1,...]`, one bitstring per row.
// One value column gives shape [], k > 1 columns give shape [k].
TabularGame LoadTabularGame(const std::filesystem::path& path);
TabularGame ParseTabularGame(std::string_view text,
                             const std::string& source = "<memory>");
void SaveTabularGame(const TabularGame& game,
                     const std::filesystem::path& path);

}  // namespace msa

#endif  // MSA_GAME_H_
