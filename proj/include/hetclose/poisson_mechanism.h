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

// The Poisson mechanism: adding Poisson(mu) noise to every bin of a
// histogram with L1 sensitivity `sensitivity` is (eps, delta)-DP once
//   mu >= 16 ln(10/delta) / (1 - e^{-eps/sensitivity})^2
//         + 2 sensitivity / (1 - e^{-eps/sensitivity}).

#ifndef HETCLOSE_POISSON_MECHANISM_H_
#define HETCLOSE_POISSON_MECHANISM_H_

#include <cstdint>

#include "absl/status/statusor.h"

namespace hetclose {

struct PoissonMechanismParams {
  double epsilon = 1;
  double delta = 0.1;
  int sensitivity = 1;
  int64_t mu = 0;
};

// The real-valued right-hand side of the bound above.
absl::StatusOr<double> PoissonNoiseBound(double epsilon, double delta,
                                         int sensitivity = 1);

// Smallest integer mu meeting the bound.
absl::StatusOr<int64_t> PoissonMu(double epsilon, double delta,
                                  int sensitivity = 1);

// Builds params with mu = PoissonMu(...).
absl::StatusOr<PoissonMechanismParams> MakePoissonMechanism(
    double epsilon, double delta, int sensitivity = 1);

// True iff params.mu meets the bound for (epsilon, delta, sensitivity).
bool SatisfiesPoissonBound(const PoissonMechanismParams& params);

}  // namespace hetclose

#endif  // HETCLOSE_POISSON_MECHANISM_H_
