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

#ifndef MSA_STATS_H_
#define MSA_STATS_H_

#include <span>

namespace msa {

struct Correlation {
  double r = 0.0;
  // Set when either input has zero variance; r is then reported as 0.
  bool zero_variance = false;
};

// Pearson correlation of two equal-length vectors (two-pass, mean-centred).
// The result is clamped to [-1, 1]. Throws ShapeMismatch on length mismatch
// and InvalidArgument for fewer than 2 samples.
Correlation Pearson(std::span<const double> a, std::span<const double> b);

}  // namespace msa

#endif  // MSA_STATS_H_
