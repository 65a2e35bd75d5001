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

#include "msa/stats.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "msa/errors.h"

namespace msa {

Correlation Pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeMismatch("correlation inputs differ in length (" +
                        std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
  }
  const std::size_t n = a.size();
  if (n < 2) throw InvalidArgument("correlation needs at least 2 samples");

  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= static_cast<double>(n);
  mean_b /= static_cast<double>(n);

  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa == 0.0 || sbb == 0.0) return {0.0, true};
  const double r = sab / (std::sqrt(saa) * std::sqrt(sbb));
  return {std::clamp(r, -1.0, 1.0), false};
}

}  // namespace msa
