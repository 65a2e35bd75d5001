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

#ifndef MSA_RNG_H_
#define MSA_RNG_H_

// Portable random source for permutation sampling and Louvain visit orders.
//
// The generator is SplitMix64 (Steele, Lea & Flood 2014): a 64-bit counter
// advanced by the golden-ratio increment and passed through a fixed mixer.
// Everything here is integer arithmetic with fully specified results, so a
// seed reproduces the same stream on every platform and compiler. The
// standard <random> distributions are avoided for that reason.
//
// Stream splitting: the k-th permutation of a run seeded with `seed` uses a
// generator seeded with DeriveSeed(seed, k), so permutation k is the same no
// matter which worker draws it.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace msa {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t Next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    return Mix(z);
  }

  // Uniform integer in [0, bound). Lemire's multiply-shift with rejection;
  // unbiased for every bound > 0.
  std::uint64_t UniformBelow(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(Next()) * bound;
    std::uint64_t low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(Next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double UniformDouble() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  static std::uint64_t Mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Seed of the independent sub-stream with the given index.
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64::Mix(SplitMix64::Mix(seed) ^
                         SplitMix64::Mix(index + 0x632BE59BD9B4E019ULL));
}

// In-place Fisher-Yates shuffle (Durstenfeld form, high index first).
template <typename T>
void Shuffle(std::span<T> items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.UniformBelow(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace msa

#endif  // MSA_RNG_H_
