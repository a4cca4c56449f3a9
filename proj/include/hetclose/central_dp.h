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

// Closeness testing in the central model. A trusted curator computes an
// absolute-difference statistic over four half-sample histograms and
// releases a verdict through a sigmoid randomizer. Group 2 gets the stronger
// guarantee by subsampling: only n1 of its n2 records are ever used.

#ifndef HETCLOSE_CENTRAL_DP_H_
#define HETCLOSE_CENTRAL_DP_H_

#include <cstdint>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "hetclose/distribution.h"
#include "hetclose/rng.h"

namespace hetclose {

// Z = sum_i |X_i - Y_i| + |X'_i - Y'_i| - |X_i - X'_i| - |Y_i - Y'_i|.
absl::StatusOr<int64_t> CentralStatistic(const Histogram& x,
                                         const Histogram& x_prime,
                                         const Histogram& y,
                                         const Histogram& y_prime);

// Largest |change in Z| over every single-unit move between two bins of one
// of the four histograms (the replace-one-sample neighbour relation).
absl::StatusOr<int64_t> SensitivityCheck(const Histogram& x,
                                         const Histogram& x_prime,
                                         const Histogram& y,
                                         const Histogram& y_prime);

// Largest |change in Z| over adding or removing one unit in any bin of one
// histogram (the add/remove neighbour relation).
absl::StatusOr<int64_t> AddRemoveSensitivity(const Histogram& x,
                                             const Histogram& x_prime,
                                             const Histogram& y,
                                             const Histogram& y_prime);

// 1 / (1 + e^{-x}), evaluated without overflow.
double Logistic(double x);

struct CentralStatisticValue {
  int64_t z = 0;
  double z_shifted = 0;
  // sigma(eps * z_shifted).
  double reject_prob = 0;
};

// z' = (z - c1 sqrt(n) - c2 / eps) / sensitivity. With sensitivity equal to
// the true sensitivity of z, reject_prob is eps-DP in z.
CentralStatisticValue ShiftStatistic(int64_t z, int64_t n, double epsilon,
                                     double c1, double c2,
                                     double sensitivity = 2.0);

// Rejects with probability sigma(eps z').
TestVerdict PrivatizedVerdict(int64_t z, int64_t n, double epsilon, double c1,
                              double c2, Rng& rng, double sensitivity = 2.0);

// Uniform m-subset without replacement, in random order.
absl::StatusOr<SampleSet> Subsample(const SampleSet& samples, int64_t m,
                                    Rng& rng);

// ln(1 + (n1/n2)(e^{eps1} - 1)).
absl::StatusOr<double> AmplifiedEpsilon(double eps1, int64_t n1, int64_t n2);
// (n1/n2) delta1.
absl::StatusOr<double> AmplifiedDelta(double delta1, int64_t n1, int64_t n2);

// Smallest n2 >= n1 with AmplifiedEpsilon(eps1, n1, n2) <= eps2.
absl::StatusOr<int64_t> MinimalGroupTwoCount(double eps1, double eps2,
                                             int64_t n1);

struct CentralConfig {
  int k = 0;
  double alpha = 0;
  double eps1 = 1;
  double eps2 = 1;
  // Samples fed to the core tester per group.
  int64_t n1 = 0;
  // Group-2 records collected; n1 of them are subsampled.
  int64_t n2 = 0;
  double c1 = 0;
  double c2 = 0;
  // Divisor of the shift. Moving one sample between bins of one histogram
  // changes z by up to 4, so 4 keeps the release eps1-DP under the
  // replace-one relation; 2 is enough only for add/remove neighbours.
  double sensitivity = 4.0;

  absl::Status Validate() const;
};

// Z of one run: n1 samples of p split into halves X, X'; n2 samples of q
// subsampled to n1 and split into Y, Y'.
absl::StatusOr<int64_t> CentralRawStatistic(const CentralConfig& config,
                                            const Distribution& p,
                                            const Distribution& q, Rng& rng);

absl::StatusOr<TestVerdict> RunCentral(const CentralConfig& config,
                                       const Distribution& p,
                                       const Distribution& q, Rng& rng);

struct CentralConstants {
  double c1 = 0;
  double c2 = 0;
  // Mean null reject probability at (c1, c2) over the calibration draws.
  double null_reject_prob = 0;
};

// c1: `c1_quantile` empirical quantile of Z / sqrt(n1) under (null, null).
// c2: smallest value (to 1e-6 relative) whose mean null reject probability
// over the same draws is at most `target_reject`.
absl::StatusOr<CentralConstants> CalibrateCentralConstants(
    const CentralConfig& config, const Distribution& null, int trials,
    double c1_quantile, double target_reject, const Rng& rng);

}  // namespace hetclose

#endif  // HETCLOSE_CENTRAL_DP_H_
