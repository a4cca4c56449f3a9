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

// Closeness testing in the shuffle model. Each group has its own shuffler;
// users of group i send their sample plus decoy messages so that every
// symbol receives Poisson(mu_i) decoys in total. The shuffled multiset is a
// histogram X ~ Poisson(n_i p + mu_i) bin-wise, i.e. a Poissonized sample of
// size N_i = n_i + k mu_i from the mixture (1 - gamma_i) p + gamma_i U.
// Coupling n1 mu2 = n2 mu1 makes gamma_1 = gamma_2, so the mixtures keep
// equality and shrink distance by exactly (1 - gamma).

#ifndef HETCLOSE_SHUFFLE_PROTOCOL_H_
#define HETCLOSE_SHUFFLE_PROTOCOL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "hetclose/distribution.h"
#include "hetclose/rng.h"

namespace hetclose {

// The analyzer's whole view of one shuffler.
struct ShuffledHistogram {
  Group group = Group::kFirst;
  Histogram counts;

  // JSON integer array of bin counts.
  std::string ToJson() const;
  static absl::StatusOr<ShuffledHistogram> FromJson(std::string_view json,
                                                    Group group);
};

// Histogram-level simulation: bin j ~ Poisson(n p_j + mu), independently.
ShuffledHistogram SimulateShuffler(const Distribution& dist, int64_t n,
                                   int64_t mu, Rng& rng,
                                   Group group = Group::kFirst);

// Message-level simulation with the same law. N ~ Poisson(n) users each send
// their sample and, for every symbol, Poisson(mu / N) decoys; with N = 0 a
// single coordinator sends Poisson(mu) decoys per symbol. The messages are
// uniformly permuted and the analyzer counts them.
ShuffledHistogram SimulateShufflerPerUser(const Distribution& dist, int64_t n,
                                          int64_t mu, Rng& rng,
                                          Group group = Group::kFirst);

// Exactly n users (no Poissonization) plus Poisson(mu) decoys per symbol.
ShuffledHistogram SimulateShufflerFixedN(const Distribution& dist, int64_t n,
                                         int64_t mu, Rng& rng,
                                         Group group = Group::kFirst);

struct MixtureParams {
  int k = 0;
  int64_t n1 = 0;
  int64_t n2 = 0;
  int64_t mu1 = 0;
  int64_t mu2 = 0;

  int64_t N1() const { return n1 + k * mu1; }
  int64_t N2() const { return n2 + k * mu2; }
  double gamma1() const { return static_cast<double>(k * mu1) / N1(); }
  double gamma2() const { return static_cast<double>(k * mu2) / N2(); }
  // gamma1 == gamma2 as exact rationals.
  bool Coupled() const { return n1 * mu2 == n2 * mu1; }
};

// n1 is rounded up to the nearest multiple of mu1 / gcd(mu1, mu2) and
// n2 = n1 mu2 / mu1, so the coupling holds exactly with the least change.
absl::StatusOr<MixtureParams> MixtureParamsFromMu(int k, int64_t n1,
                                                  int64_t mu1, int64_t mu2);

// mu_i = PoissonMu(eps_i, delta_i, 1), then MixtureParamsFromMu.
absl::StatusOr<MixtureParams> MakeMixtureParams(int k, int64_t n1, double eps1,
                                                double eps2, double delta1,
                                                double delta2);
inline absl::StatusOr<MixtureParams> MakeMixtureParams(int k, int64_t n1,
                                                       double eps1, double eps2,
                                                       double delta) {
  return MakeMixtureParams(k, n1, eps1, eps2, delta, delta);
}

// (1 - gamma) p + gamma U.
absl::StatusOr<Distribution> MixWithUniform(const Distribution& p,
                                            double gamma);

// Z = sum_i [(N2 X_i - N1 Y_i)^2 - N2^2 X_i - N1^2 Y_i] / (X_i + Y_i);
// empty bins contribute 0.
absl::StatusOr<double> UnevenClosenessStatistic(const Histogram& x,
                                                const Histogram& y, int64_t n1,
                                                int64_t n2);

// Number of parts for the public-coin variant:
// min(k, max(2, floor(k^{2/3} / (alpha^{4/3} mu1^{2/3})))).
int CompressedDomainSize(int k, double alpha, int64_t mu1);

enum class ShufflerMode { kPoissonized, kPerUser, kFixedN };

struct ShuffleConfig {
  int k = 0;
  double alpha = 0;
  double eps1 = 1;
  double eps2 = 1;
  double delta = 1e-6;
  // Per-group delta; unset means `delta`.
  std::optional<double> delta1;
  std::optional<double> delta2;
  int64_t n1 = 0;
  int64_t n2 = 0;
  bool public_coin = false;
  int compressed_size = 2;
  double compression_c1 = 1.0;
  int repetitions = 1;
  // Acceptance threshold on Z; calibrated under the null.
  std::optional<double> threshold;
  ShufflerMode mode = ShufflerMode::kPoissonized;

  double Delta1() const { return delta1.value_or(delta); }
  double Delta2() const { return delta2.value_or(delta); }
  absl::StatusOr<int64_t> Mu1() const;
  absl::StatusOr<int64_t> Mu2() const;

  // Checks parameter ranges and n1 mu2 == n2 mu1.
  absl::Status Validate() const;
};

// Z of one private-coin run, or of one public-coin repetition.
absl::StatusOr<double> ShuffleStatistic(const ShuffleConfig& config,
                                        const Distribution& p,
                                        const Distribution& q, Rng& rng);

// Empirical `quantile` of ShuffleStatistic under (null, null) over `trials`
// runs, trial t on rng.Fork(t).
absl::StatusOr<double> CalibrateShuffleThreshold(const ShuffleConfig& config,
                                                 const Distribution& null,
                                                 int trials, double quantile,
                                                 const Rng& rng);

absl::StatusOr<TestVerdict> RunShufflePrivateCoin(const ShuffleConfig& config,
                                                  const Distribution& p,
                                                  const Distribution& q,
                                                  Rng& rng);

// Each repetition shares a random partition into compressed_size parts; users
// report compressed symbols and decoys over the compressed domain; majority
// over repetitions.
absl::StatusOr<TestVerdict> RunShufflePublicCoin(const ShuffleConfig& config,
                                                 const Distribution& p,
                                                 const Distribution& q,
                                                 Rng& rng);

}  // namespace hetclose

#endif  // HETCLOSE_SHUFFLE_PROTOCOL_H_
