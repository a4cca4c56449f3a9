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

// Core value types shared by every protocol. Symbols are 0-based: a
// distribution over a domain of size k has support {0, ..., k-1}.

#ifndef HETCLOSE_DISTRIBUTION_H_
#define HETCLOSE_DISTRIBUTION_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace hetclose {

enum class TestVerdict { kAccept, kReject };

std::string_view VerdictName(TestVerdict verdict);

// Which population a sample or message belongs to: group 1 draws from p and
// carries (eps1, delta1), group 2 draws from q and carries (eps2, delta2).
enum class Group { kFirst = 1, kSecond = 2 };

// Probability mass function over [k]. Immutable once built; invalid vectors
// are rejected, never renormalized.
class Distribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  static absl::StatusOr<Distribution> Create(std::vector<double> pmf);
  static Distribution Uniform(int k);
  static Distribution PointMass(int k, int symbol);

  int k() const { return static_cast<int>(pmf_.size()); }
  std::span<const double> pmf() const { return pmf_; }
  double operator[](int symbol) const { return pmf_[symbol]; }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  explicit Distribution(std::vector<double> pmf) : pmf_(std::move(pmf)) {}

  std::vector<double> pmf_;
};

struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 0.0;

  // Checks epsilon > 0 and 0 <= delta < 1; with `pure` also delta == 0.
  absl::Status Validate(bool pure = false) const;
};

struct SampleSet {
  int k = 0;
  Group source = Group::kFirst;
  std::vector<int32_t> values;

  size_t size() const { return values.size(); }
};

// Occurrence counts over [k].
class Histogram {
 public:
  Histogram() = default;
  explicit Histogram(std::vector<int64_t> counts);

  static Histogram FromSamples(std::span<const int32_t> values, int k);

  int k() const { return static_cast<int>(counts_.size()); }
  int64_t total() const { return total_; }
  std::span<const int64_t> counts() const { return counts_; }
  int64_t operator[](int symbol) const { return counts_[symbol]; }

  // Moves one unit from bin `from` to bin `to`; the total is unchanged.
  void MoveUnit(int from, int to);
  void Add(int symbol, int64_t delta);

  friend bool operator==(const Histogram&, const Histogram&) = default;

 private:
  std::vector<int64_t> counts_;
  int64_t total_ = 0;
};

}  // namespace hetclose

#endif  // HETCLOSE_DISTRIBUTION_H_
