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

#include "hetclose/distribution.h"

#include <cmath>
#include <numeric>
#include <utility>

#include "absl/strings/str_format.h"

namespace hetclose {

std::string_view VerdictName(TestVerdict verdict) {
  return verdict == TestVerdict::kAccept ? "accept" : "reject";
}

absl::StatusOr<Distribution> Distribution::Create(std::vector<double> pmf) {
  if (pmf.size() < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("domain size must be at least 2, got %d", pmf.size()));
  }
  double sum = 0;
  for (size_t i = 0; i < pmf.size(); ++i) {
    if (!std::isfinite(pmf[i]) || pmf[i] < 0 || pmf[i] > 1) {
      return absl::InvalidArgumentError(
          absl::StrFormat("pmf entry %d = %g is not in [0, 1]", i, pmf[i]));
    }
    sum += pmf[i];
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    return absl::InvalidArgumentError(
        absl::StrFormat("pmf sums to %.17g, expected 1", sum));
  }
  return Distribution(std::move(pmf));
}

Distribution Distribution::Uniform(int k) {
  return Distribution(std::vector<double>(k, 1.0 / k));
}

Distribution Distribution::PointMass(int k, int symbol) {
  std::vector<double> pmf(k, 0.0);
  pmf[symbol] = 1.0;
  return Distribution(std::move(pmf));
}

absl::Status PrivacyParams::Validate(bool pure) const {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be positive, got %g", epsilon));
  }
  if (!(delta >= 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in [0, 1), got %g", delta));
  }
  if (pure && delta != 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("pure privacy requires delta = 0, got %g", delta));
  }
  return absl::OkStatus();
}

Histogram::Histogram(std::vector<int64_t> counts)
    : counts_(std::move(counts)),
      total_(std::accumulate(counts_.begin(), counts_.end(), int64_t{0})) {}

Histogram Histogram::FromSamples(std::span<const int32_t> values, int k) {
  std::vector<int64_t> counts(k, 0);
  for (int32_t v : values) ++counts[v];
  return Histogram(std::move(counts));
}

void Histogram::MoveUnit(int from, int to) {
  --counts_[from];
  ++counts_[to];
}

void Histogram::Add(int symbol, int64_t delta) {
  counts_[symbol] += delta;
  total_ += delta;
}

}  // namespace hetclose
