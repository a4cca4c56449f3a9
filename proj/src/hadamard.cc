// Copyright 2026 The Hetclose Authors
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

#include "hetclose/hadamard.h"

#include "absl/strings/str_format.h"

namespace hetclose {

std::vector<int> HadamardDesign::ColumnSet(int column) const {
  std::vector<int> members;
  members.reserve(column == 0 ? order_ : order_ / 2);
  for (int x = 0; x < order_; ++x) {
    if (Contains(column, x)) members.push_back(x);
  }
  return members;
}

std::vector<double> HadamardDesign::ColumnMasses(const Distribution& p) const {
  std::vector<double> h(order_, 0.0);
  for (int x = 0; x < p.k(); ++x) h[x] = p[x];
  WalshHadamardTransform(h);
  // h_j = p(C_j) - (1 - p(C_j)).
  for (double& v : h) v = 0.5 * (1.0 + v);
  return h;
}

absl::StatusOr<HadamardDesign> BuildDesign(int k) {
  if (k < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("k must be at least 2, got %d", k));
  }
  if (k + 1 > HadamardDesign::kMaxOrder) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "k=%d needs a Hadamard order above the %d budget", k,
        HadamardDesign::kMaxOrder));
  }
  const int order = static_cast<int>(std::bit_ceil(static_cast<uint32_t>(k + 1)));
  return HadamardDesign(k, order);
}

absl::StatusOr<double> ParsevalGap(const HadamardDesign& design,
                                   const Distribution& p,
                                   const Distribution& q) {
  if (p.k() != design.k() || q.k() != design.k()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "design is over k=%d but got distributions over %d and %d",
        design.k(), p.k(), q.k()));
  }
  std::vector<double> diff(design.order(), 0.0);
  for (int x = 0; x < p.k(); ++x) diff[x] = p[x] - q[x];
  WalshHadamardTransform(diff);
  // p(C_j) - q(C_j) = (H (p - q))_j / 2.
  double gap = 0;
  for (double v : diff) gap += 0.25 * v * v;
  return gap;
}

void WalshHadamardTransform(std::vector<double>& values) {
  const size_t n = values.size();
  for (size_t len = 1; len < n; len <<= 1) {
    for (size_t block = 0; block < n; block += 2 * len) {
      for (size_t i = block; i < block + len; ++i) {
        const double a = values[i];
        const double b = values[i + len];
        values[i] = a + b;
        values[i + len] = a - b;
      }
    }
  }
}

}  // namespace hetclose
