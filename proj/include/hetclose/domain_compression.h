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

// Random-partition domain compression. Public randomness picks a partition
// of [k] into k' parts; users report the part their sample falls in, and the
// analyzer works with the induced distributions p_Pi(i) = p(Pi_i).

#ifndef HETCLOSE_DOMAIN_COMPRESSION_H_
#define HETCLOSE_DOMAIN_COMPRESSION_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "hetclose/distribution.h"
#include "hetclose/rng.h"

namespace hetclose {

class Partition {
 public:
  // `assignment[x]` is the part of symbol x; every entry must be in
  // [0, parts) and 2 <= parts <= assignment.size().
  static absl::StatusOr<Partition> Create(int parts,
                                          std::vector<int32_t> assignment);

  int k() const { return static_cast<int>(assignment_.size()); }
  int parts() const { return parts_; }
  int32_t PartOf(int symbol) const { return assignment_[symbol]; }
  const std::vector<int32_t>& assignment() const { return assignment_; }

  // JSON array of part indices, e.g. "[0,1,1,0]".
  std::string ToJson() const;
  static absl::StatusOr<Partition> FromJson(std::string_view json, int parts);

 private:
  Partition(int parts, std::vector<int32_t> assignment)
      : parts_(parts), assignment_(std::move(assignment)) {}

  int parts_;
  std::vector<int32_t> assignment_;
};

// Each symbol is assigned an independent uniform part. Parts may be empty;
// they then carry zero mass.
absl::StatusOr<Partition> RandomPartition(int k, int parts, Rng& rng);

// The pushforward distribution on [parts].
absl::StatusOr<Distribution> Induce(const Distribution& p,
                                    const Partition& partition);

// Maps every sample through the partition.
absl::StatusOr<SampleSet> CompressSamples(const SampleSet& samples,
                                          const Partition& partition);

// Empirical distance-shrinkage constants for one (p, q, parts) instance.
// Over `trials` random partitions, ratio = TV(p_Pi, q_Pi) /
// (sqrt(parts/k) TV(p, q)); c1 is the (1 - c2) empirical quantile of the
// ratio, so a fraction c2 of partitions keeps TV(p_Pi, q_Pi) >= c1 sqrt(k'/k)
// TV(p, q).
struct CompressionConstants {
  double c1 = 0;
  double c2 = 0;
  int trials = 0;
};

absl::StatusOr<CompressionConstants> EstimateCompressionConstants(
    const Distribution& p, const Distribution& q, int parts, double c2,
    int trials, Rng& rng);

}  // namespace hetclose

#endif  // HETCLOSE_DOMAIN_COMPRESSION_H_
