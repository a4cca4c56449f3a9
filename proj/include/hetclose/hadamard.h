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

#ifndef HETCLOSE_HADAMARD_H_
#define HETCLOSE_HADAMARD_H_

#include <bit>
#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "hetclose/distribution.h"

namespace hetclose {

// Column sets of the K x K Sylvester-Hadamard matrix, K the smallest power
// of two with K >= k + 1. Entry (x, j) is +1 iff popcount(x & j) is even,
// so column set C_j = {x in [K] : popcount(x & j) even}. Column 0 is the
// all-ones column and every other column set has exactly K/2 members.
//
// The matrix is never stored; membership is a parity test.
class HadamardDesign {
 public:
  static constexpr int kMaxOrder = 1 << 16;

  int k() const { return k_; }
  int order() const { return order_; }

  bool Contains(int column, int symbol) const {
    return (std::popcount(static_cast<uint32_t>(column & symbol)) & 1) == 0;
  }

  // Members of C_column in increasing order.
  std::vector<int> ColumnSet(int column) const;

  // p(C_j) for every column j, with p embedded in [K] (zero mass above k).
  // Computed with a fast Walsh-Hadamard transform in O(K log K).
  std::vector<double> ColumnMasses(const Distribution& p) const;

 private:
  friend absl::StatusOr<HadamardDesign> BuildDesign(int k);
  HadamardDesign(int k, int order) : k_(k), order_(order) {}

  int k_;
  int order_;
};

absl::StatusOr<HadamardDesign> BuildDesign(int k);

// Sum over all K columns of (p(C_j) - q(C_j))^2. Equals (K/4) ||p - q||_2^2.
absl::StatusOr<double> ParsevalGap(const HadamardDesign& design,
                                   const Distribution& p,
                                   const Distribution& q);

// In-place unnormalized Walsh-Hadamard transform; size must be a power of 2.
void WalshHadamardTransform(std::vector<double>& values);

}  // namespace hetclose

#endif  // HETCLOSE_HADAMARD_H_
