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

#include "hetclose/distances.h"

#include <cmath>

#include "absl/strings/str_format.h"

namespace hetclose {

absl::StatusOr<double> TvDistance(const Distribution& p,
                                  const Distribution& q) {
  if (p.k() != q.k()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "domain size mismatch: %d vs %d", p.k(), q.k()));
  }
  double l1 = 0;
  for (int i = 0; i < p.k(); ++i) l1 += std::abs(p[i] - q[i]);
  return 0.5 * l1;
}

absl::StatusOr<double> L2DistanceSq(std::span<const double> u,
                                    std::span<const double> v) {
  if (u.size() != v.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "length mismatch: %d vs %d", u.size(), v.size()));
  }
  double sum = 0;
  for (size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    sum += d * d;
  }
  return sum;
}

}  // namespace hetclose
