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

#include "hetclose/domain_compression.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_format.h"
#include "hetclose/distances.h"
#include "hetclose/status_macros.h"
#include "json.hpp"

namespace hetclose {

absl::StatusOr<Partition> Partition::Create(int parts,
                                            std::vector<int32_t> assignment) {
  const int k = static_cast<int>(assignment.size());
  if (parts < 2 || parts > k) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "number of parts must lie in [2, %d], got %d", k, parts));
  }
  for (int x = 0; x < k; ++x) {
    if (assignment[x] < 0 || assignment[x] >= parts) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "symbol %d assigned to part %d outside [0, %d)", x, assignment[x],
          parts));
    }
  }
  return Partition(parts, std::move(assignment));
}

std::string Partition::ToJson() const {
  return nlohmann::json(assignment_).dump();
}

absl::StatusOr<Partition> Partition::FromJson(std::string_view json,
                                              int parts) {
  const nlohmann::json parsed = nlohmann::json::parse(json, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_array()) {
    return absl::InvalidArgumentError("partition must be a JSON array");
  }
  std::vector<int32_t> assignment;
  assignment.reserve(parsed.size());
  for (const auto& entry : parsed) {
    if (!entry.is_number_integer()) {
      return absl::InvalidArgumentError("partition entries must be integers");
    }
    assignment.push_back(entry.get<int32_t>());
  }
  return Create(parts, std::move(assignment));
}

absl::StatusOr<Partition> RandomPartition(int k, int parts, Rng& rng) {
  if (parts < 2 || parts > k) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "number of parts must lie in [2, %d], got %d", k, parts));
  }
  std::vector<int32_t> assignment(k);
  for (auto& part : assignment) {
    part = static_cast<int32_t>(rng.UniformInt(static_cast<uint64_t>(parts)));
  }
  return Partition::Create(parts, std::move(assignment));
}

absl::StatusOr<Distribution> Induce(const Distribution& p,
                                    const Partition& partition) {
  if (p.k() != partition.k()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "distribution over %d symbols, partition over %d", p.k(),
        partition.k()));
  }
  std::vector<double> induced(partition.parts(), 0.0);
  for (int x = 0; x < p.k(); ++x) induced[partition.PartOf(x)] += p[x];
  for (double& v : induced) v = std::min(v, 1.0);
  return Distribution::Create(std::move(induced));
}

absl::StatusOr<SampleSet> CompressSamples(const SampleSet& samples,
                                          const Partition& partition) {
  SampleSet out{.k = partition.parts(), .source = samples.source, .values = {}};
  out.values.reserve(samples.size());
  for (int32_t v : samples.values) {
    if (v < 0 || v >= partition.k()) {
      return absl::OutOfRangeError(absl::StrFormat(
          "sample %d outside the partitioned domain [0, %d)", v,
          partition.k()));
    }
    out.values.push_back(partition.PartOf(v));
  }
  return out;
}

absl::StatusOr<CompressionConstants> EstimateCompressionConstants(
    const Distribution& p, const Distribution& q, int parts, double c2,
    int trials, Rng& rng) {
  if (!(c2 > 0 && c2 < 1) || trials < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need c2 in (0, 1) and trials >= 1 (c2=%g, trials=%d)", c2, trials));
  }
  ASSIGN_OR_RETURN(const double tv, TvDistance(p, q));
  if (tv <= 0) {
    return absl::InvalidArgumentError(
        "compression constants need a pair with positive distance");
  }
  const double scale = std::sqrt(static_cast<double>(parts) / p.k()) * tv;
  std::vector<double> ratios;
  ratios.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    ASSIGN_OR_RETURN(Partition partition, RandomPartition(p.k(), parts, rng));
    ASSIGN_OR_RETURN(Distribution pi_p, Induce(p, partition));
    ASSIGN_OR_RETURN(Distribution pi_q, Induce(q, partition));
    ASSIGN_OR_RETURN(const double compressed, TvDistance(pi_p, pi_q));
    ratios.push_back(compressed / scale);
  }
  std::sort(ratios.begin(), ratios.end());
  // Largest c1 such that at least ceil(c2 * trials) ratios reach it.
  const int keep = static_cast<int>(std::ceil(c2 * trials));
  return CompressionConstants{
      .c1 = ratios[trials - keep], .c2 = c2, .trials = trials};
}

}  // namespace hetclose
