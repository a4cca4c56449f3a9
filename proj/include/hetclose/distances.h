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

#ifndef HETCLOSE_DISTANCES_H_
#define HETCLOSE_DISTANCES_H_

#include <span>

#include "absl/status/statusor.h"
#include "hetclose/distribution.h"

namespace hetclose {

// Total variation distance, computed as half the L1 distance.
absl::StatusOr<double> TvDistance(const Distribution& p, const Distribution& q);

// Squared Euclidean distance between equal-length vectors.
absl::StatusOr<double> L2DistanceSq(std::span<const double> u,
                                    std::span<const double> v);

}  // namespace hetclose

#endif  // HETCLOSE_DISTANCES_H_
