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

#ifndef HETCLOSE_SAMPLING_H_
#define HETCLOSE_SAMPLING_H_

#include <cstdint>
#include <vector>

#include "hetclose/distribution.h"
#include "hetclose/rng.h"

namespace hetclose {

// Walker alias table: O(k) setup, O(1) per draw.
class AliasSampler {
 public:
  explicit AliasSampler(const Distribution& dist);

  int32_t Draw(Rng& rng) const;

 private:
  std::vector<double> threshold_;
  std::vector<int32_t> alias_;
};

// n i.i.d. symbols from `dist`.
SampleSet Sample(const Distribution& dist, int64_t n, Rng& rng,
                 Group source = Group::kFirst);

// One Poisson(mean) variate. Sequential inversion below mean 10 (exact up to
// floating point), Hormann's transformed rejection (PTRS) above.
int64_t SamplePoisson(double mean, Rng& rng);

// The Poissonization step: the number of participants when n are expected.
inline int64_t PoissonSampleCount(int64_t n, Rng& rng) {
  return SamplePoisson(static_cast<double>(n), rng);
}

}  // namespace hetclose

#endif  // HETCLOSE_SAMPLING_H_
