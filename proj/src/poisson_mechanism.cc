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

#include "hetclose/poisson_mechanism.h"

#include <cmath>

#include "absl/strings/str_format.h"
#include "hetclose/status_macros.h"

namespace hetclose {

absl::StatusOr<double> PoissonNoiseBound(double epsilon, double delta,
                                         int sensitivity) {
  if (!(epsilon > 0) || std::isinf(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be positive and finite, got %g", epsilon));
  }
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  if (sensitivity < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sensitivity must be at least 1, got %d", sensitivity));
  }
  // 1 - e^{-x} computed without cancellation for small x.
  const double shrink = -std::expm1(-epsilon / sensitivity);
  return 16.0 * std::log(10.0 / delta) / (shrink * shrink) +
         2.0 * sensitivity / shrink;
}

absl::StatusOr<int64_t> PoissonMu(double epsilon, double delta,
                                  int sensitivity) {
  ASSIGN_OR_RETURN(const double bound,
                   PoissonNoiseBound(epsilon, delta, sensitivity));
  return static_cast<int64_t>(std::ceil(bound));
}

absl::StatusOr<PoissonMechanismParams> MakePoissonMechanism(
    double epsilon, double delta, int sensitivity) {
  ASSIGN_OR_RETURN(const int64_t mu, PoissonMu(epsilon, delta, sensitivity));
  return PoissonMechanismParams{.epsilon = epsilon,
                                .delta = delta,
                                .sensitivity = sensitivity,
                                .mu = mu};
}

bool SatisfiesPoissonBound(const PoissonMechanismParams& params) {
  const absl::StatusOr<double> bound =
      PoissonNoiseBound(params.epsilon, params.delta, params.sensitivity);
  return bound.ok() && static_cast<double>(params.mu) >= *bound;
}

}  // namespace hetclose
