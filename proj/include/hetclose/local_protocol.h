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

// Closeness testing under local differential privacy. Every user sends one
// randomized-response bit about membership of its sample in a Hadamard
// column set; the analyzer tests closeness of the resulting product-
// Bernoulli distributions.

#ifndef HETCLOSE_LOCAL_PROTOCOL_H_
#define HETCLOSE_LOCAL_PROTOCOL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "hetclose/bit_matrix.h"
#include "hetclose/distribution.h"
#include "hetclose/hadamard.h"
#include "hetclose/rng.h"

namespace hetclose {

// `rows` i.i.d. draws from the product of Bernoulli(mu_j).
absl::StatusOr<BitMatrix> SampleProductBernoulli(std::span<const double> mu,
                                                 int rows, Rng& rng);

// Splits users into K = design.order() groups of m = floor(n/K); surplus
// users are dropped. User u belongs to group u / m and fills row u % m, so
// row r collects one user from every group. The user in group j sends
// 1{x in C_j} through binary randomized response at `epsilon`; an infinite
// epsilon sends the bit unchanged.
absl::StatusOr<BitMatrix> EncodeUsers(const SampleSet& samples,
                                      const HadamardDesign& design,
                                      double epsilon, Rng& rng);

// Per-column unbiased estimate of the clean mean:
// gamma (mean_j - 1/(e^eps + 1)), gamma = (e^eps + 1)/(e^eps - 1).
std::vector<double> DebiasedMeans(const BitMatrix& rows, double epsilon);

// <mean(X) - mean(Y), mean(X') - mean(Y')>.
absl::StatusOr<double> Z1Statistic(const BitMatrix& x, const BitMatrix& x_prime,
                                   const BitMatrix& y,
                                   const BitMatrix& y_prime);

// Rows needed per half for the non-private product tester:
// ceil(100 sqrt(d) / alpha^2).
int64_t ProductTestSampleSize(int dims, double alpha);

// Upper bound on Var(Z1) with n rows per half:
// d / n^2 + 2 ||mu(P) - mu(Q)||^2 / n.
double Z1VarianceBound(int dims, int64_t rows, double mean_gap_sq);

// Splits each matrix into two equal halves (a trailing odd row is dropped)
// and accepts iff Z1 <= alpha^2 / 2.
absl::StatusOr<TestVerdict> Z1Test(const BitMatrix& p_rows,
                                   const BitMatrix& q_rows, double alpha);

// <g1 (mean(X) - 1/2) - g2 (mean(Y) - 1/2),
//  g1 (mean(X') - 1/2) - g2 (mean(Y') - 1/2)>, g_i the debias scale of
// eps_i. X, X' come through the eps1 channel and Y, Y' through eps2.
absl::StatusOr<double> Z2Statistic(const BitMatrix& x, const BitMatrix& x_prime,
                                   const BitMatrix& y, const BitMatrix& y_prime,
                                   double eps1, double eps2);

struct LocalConfig {
  int k = 0;
  double alpha = 0;
  double eps1 = 1;
  double eps2 = 1;
  // User counts of the two groups.
  int64_t n1 = 0;
  int64_t n2 = 0;
  // Acceptance threshold on Z2; unset means alpha'^2 / 2 with alpha' the
  // distance handed to the underlying tester.
  std::optional<double> threshold;
  bool public_coin = false;
  // Public coin only: number of parts L of the shared random partition.
  int compressed_size = 2;
  // Public coin only: the tester on the compressed domain targets
  // alpha' = compression_c1 * sqrt(L / k) * alpha.
  double compression_c1 = 1.0;
  // Public coin only: independent runs combined by majority; each run uses
  // floor(n / repetitions) fresh users per group. Must be odd.
  int repetitions = 1;

  // Distance targeted by the tester that actually runs.
  double EffectiveAlpha() const;
  double EffectiveThreshold() const;

  absl::Status Validate() const;
};

// The Z2 value of one private-coin run on (p, q), or of one public-coin
// repetition on a fresh partition when config.public_coin is set.
absl::StatusOr<double> LocalStatistic(const LocalConfig& config,
                                      const Distribution& p,
                                      const Distribution& q, Rng& rng);

// Private coin: n1 users hold samples of p, n2 users samples of q; accept iff
// Z2 <= threshold.
absl::StatusOr<TestVerdict> RunLocalPrivateCoin(const LocalConfig& config,
                                                const Distribution& p,
                                                const Distribution& q,
                                                Rng& rng);

// Public coin: each repetition draws a shared random partition into L parts,
// users report their compressed symbol through the private-coin protocol at
// distance alpha', and the verdicts are combined by majority.
absl::StatusOr<TestVerdict> RunLocalPublicCoin(const LocalConfig& config,
                                               const Distribution& p,
                                               const Distribution& q,
                                               Rng& rng);

}  // namespace hetclose

#endif  // HETCLOSE_LOCAL_PROTOCOL_H_
