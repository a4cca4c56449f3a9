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

#include "hetclose/shuffle_protocol.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "absl/strings/str_format.h"
#include "hetclose/domain_compression.h"
#include "hetclose/majority.h"
#include "hetclose/poisson_mechanism.h"
#include "hetclose/sampling.h"
#include "hetclose/status_macros.h"
#include "json.hpp"

namespace hetclose {
namespace {

ShuffledHistogram ShuffleMessages(std::vector<int32_t> messages, int k,
                                  Group group, Rng& rng) {
  for (size_t i = messages.size(); i > 1; --i) {
    std::swap(messages[i - 1], messages[rng.UniformInt(i)]);
  }
  return ShuffledHistogram{.group = group,
                           .counts = Histogram::FromSamples(messages, k)};
}

ShuffledHistogram Simulate(ShufflerMode mode, const Distribution& dist,
                           int64_t n, int64_t mu, Rng& rng, Group group) {
  switch (mode) {
    case ShufflerMode::kPerUser:
      return SimulateShufflerPerUser(dist, n, mu, rng, group);
    case ShufflerMode::kFixedN:
      return SimulateShufflerFixedN(dist, n, mu, rng, group);
    case ShufflerMode::kPoissonized:
      break;
  }
  return SimulateShuffler(dist, n, mu, rng, group);
}

// Both shufflers on (p, q) with the given coupled parameters.
absl::StatusOr<double> TwoShufflerStatistic(ShufflerMode mode,
                                            const MixtureParams& mix,
                                            const Distribution& p,
                                            const Distribution& q, Rng& rng) {
  Rng rng1 = rng.Fork(1);
  Rng rng2 = rng.Fork(2);
  const ShuffledHistogram x =
      Simulate(mode, p, mix.n1, mix.mu1, rng1, Group::kFirst);
  const ShuffledHistogram y =
      Simulate(mode, q, mix.n2, mix.mu2, rng2, Group::kSecond);
  return UnevenClosenessStatistic(x.counts, y.counts, mix.N1(), mix.N2());
}

absl::StatusOr<double> PrivateCoinStatistic(const ShuffleConfig& config,
                                            const Distribution& p,
                                            const Distribution& q, Rng& rng) {
  ASSIGN_OR_RETURN(const int64_t mu1, config.Mu1());
  ASSIGN_OR_RETURN(const int64_t mu2, config.Mu2());
  const MixtureParams mix{
      .k = config.k, .n1 = config.n1, .n2 = config.n2, .mu1 = mu1, .mu2 = mu2};
  return TwoShufflerStatistic(config.mode, mix, p, q, rng);
}

absl::StatusOr<double> PublicCoinStatistic(const ShuffleConfig& config,
                                           const Distribution& p,
                                           const Distribution& q, Rng& rng) {
  ASSIGN_OR_RETURN(const int64_t mu1, config.Mu1());
  ASSIGN_OR_RETURN(const int64_t mu2, config.Mu2());
  Rng public_rng = rng.Fork(3);
  ASSIGN_OR_RETURN(Partition partition,
                   RandomPartition(config.k, config.compressed_size,
                                   public_rng));
  ASSIGN_OR_RETURN(Distribution p_pi, Induce(p, partition));
  ASSIGN_OR_RETURN(Distribution q_pi, Induce(q, partition));
  ASSIGN_OR_RETURN(
      MixtureParams mix,
      MixtureParamsFromMu(config.compressed_size,
                          config.n1 / config.repetitions, mu1, mu2));
  return TwoShufflerStatistic(config.mode, mix, p_pi, q_pi, rng);
}

absl::Status CheckPair(const ShuffleConfig& config, const Distribution& p,
                       const Distribution& q) {
  if (p.k() != config.k || q.k() != config.k) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "config is over k=%d but distributions are over %d and %d", config.k,
        p.k(), q.k()));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> RequireThreshold(const ShuffleConfig& config) {
  if (!config.threshold.has_value()) {
    return absl::FailedPreconditionError(
        "shuffle threshold is not calibrated; run CalibrateShuffleThreshold");
  }
  return *config.threshold;
}

}  // namespace

std::string ShuffledHistogram::ToJson() const {
  return nlohmann::json(std::vector<int64_t>(counts.counts().begin(),
                                             counts.counts().end()))
      .dump();
}

absl::StatusOr<ShuffledHistogram> ShuffledHistogram::FromJson(
    std::string_view json, Group group) {
  const nlohmann::json parsed = nlohmann::json::parse(json, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_array()) {
    return absl::InvalidArgumentError("histogram must be a JSON array");
  }
  std::vector<int64_t> counts;
  counts.reserve(parsed.size());
  for (const auto& entry : parsed) {
    if (!entry.is_number_integer() || entry.get<int64_t>() < 0) {
      return absl::InvalidArgumentError(
          "histogram entries must be nonnegative integers");
    }
    counts.push_back(entry.get<int64_t>());
  }
  return ShuffledHistogram{.group = group, .counts = Histogram(std::move(counts))};
}

ShuffledHistogram SimulateShuffler(const Distribution& dist, int64_t n,
                                   int64_t mu, Rng& rng, Group group) {
  std::vector<int64_t> counts(dist.k());
  for (int j = 0; j < dist.k(); ++j) {
    counts[j] = SamplePoisson(static_cast<double>(n) * dist[j] +
                                  static_cast<double>(mu),
                              rng);
  }
  return ShuffledHistogram{.group = group, .counts = Histogram(std::move(counts))};
}

ShuffledHistogram SimulateShufflerPerUser(const Distribution& dist, int64_t n,
                                          int64_t mu, Rng& rng, Group group) {
  const int k = dist.k();
  const int64_t users = PoissonSampleCount(n, rng);
  const SampleSet samples = Sample(dist, users, rng, group);
  std::vector<int32_t> messages = samples.values;
  // Decoys: with N users each adds Poisson(mu / N) per symbol, so every
  // symbol receives Poisson(mu) decoys in total.
  const int64_t senders = std::max<int64_t>(users, 1);
  const double per_sender = static_cast<double>(mu) / senders;
  for (int64_t u = 0; u < senders; ++u) {
    for (int j = 0; j < k; ++j) {
      const int64_t decoys = SamplePoisson(per_sender, rng);
      messages.insert(messages.end(), decoys, j);
    }
  }
  return ShuffleMessages(std::move(messages), k, group, rng);
}

ShuffledHistogram SimulateShufflerFixedN(const Distribution& dist, int64_t n,
                                         int64_t mu, Rng& rng, Group group) {
  const SampleSet samples = Sample(dist, n, rng, group);
  Histogram counts = Histogram::FromSamples(samples.values, dist.k());
  for (int j = 0; j < dist.k(); ++j) {
    counts.Add(j, SamplePoisson(static_cast<double>(mu), rng));
  }
  return ShuffledHistogram{.group = group, .counts = std::move(counts)};
}

absl::StatusOr<MixtureParams> MixtureParamsFromMu(int k, int64_t n1,
                                                  int64_t mu1, int64_t mu2) {
  if (k < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("k must be at least 2, got %d", k));
  }
  if (mu1 < 1 || mu2 < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "noise means must be positive, got %d and %d", mu1, mu2));
  }
  if (n1 < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("n1 must be positive, got %d", n1));
  }
  const int64_t step = mu1 / std::gcd(mu1, mu2);
  const int64_t rounded = ((n1 + step - 1) / step) * step;
  return MixtureParams{.k = k,
                       .n1 = rounded,
                       .n2 = rounded / step * (mu2 / std::gcd(mu1, mu2)),
                       .mu1 = mu1,
                       .mu2 = mu2};
}

absl::StatusOr<MixtureParams> MakeMixtureParams(int k, int64_t n1, double eps1,
                                                double eps2, double delta1,
                                                double delta2) {
  if (eps2 > eps1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "group 2 must be the more private one (eps2=%g > eps1=%g)", eps2,
        eps1));
  }
  ASSIGN_OR_RETURN(const int64_t mu1, PoissonMu(eps1, delta1));
  ASSIGN_OR_RETURN(const int64_t mu2, PoissonMu(eps2, delta2));
  return MixtureParamsFromMu(k, n1, mu1, mu2);
}

absl::StatusOr<Distribution> MixWithUniform(const Distribution& p,
                                            double gamma) {
  if (!(gamma >= 0 && gamma <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("mixture weight must lie in [0, 1], got %g", gamma));
  }
  std::vector<double> mixed(p.k());
  for (int i = 0; i < p.k(); ++i) {
    mixed[i] = (1 - gamma) * p[i] + gamma / p.k();
  }
  return Distribution::Create(std::move(mixed));
}

absl::StatusOr<double> UnevenClosenessStatistic(const Histogram& x,
                                                const Histogram& y, int64_t n1,
                                                int64_t n2) {
  if (n1 <= 0 || n2 <= 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "sample sizes must be positive, got %d and %d", n1, n2));
  }
  if (x.k() != y.k()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "histograms over %d and %d bins", x.k(), y.k()));
  }
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  double z = 0;
  for (int i = 0; i < x.k(); ++i) {
    const double xi = static_cast<double>(x[i]);
    const double yi = static_cast<double>(y[i]);
    if (xi + yi == 0) continue;
    const double diff = b * xi - a * yi;
    z += (diff * diff - b * b * xi - a * a * yi) / (xi + yi);
  }
  return z;
}

int CompressedDomainSize(int k, double alpha, int64_t mu1) {
  const double raw = std::pow(static_cast<double>(k), 2.0 / 3.0) /
                     (std::pow(alpha, 4.0 / 3.0) *
                      std::pow(static_cast<double>(mu1), 2.0 / 3.0));
  const double floored = std::floor(raw);
  if (floored >= k) return k;
  return std::max(2, static_cast<int>(floored));
}

absl::StatusOr<int64_t> ShuffleConfig::Mu1() const {
  return PoissonMu(eps1, Delta1());
}

absl::StatusOr<int64_t> ShuffleConfig::Mu2() const {
  return PoissonMu(eps2, Delta2());
}

absl::Status ShuffleConfig::Validate() const {
  if (k < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("k must be at least 2, got %d", k));
  }
  if (!(alpha > 0 && alpha <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must lie in (0, 1], got %g", alpha));
  }
  if (!(eps1 > 0) || !(eps2 > 0) || eps2 > eps1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need 0 < eps2 <= eps1, got eps1=%g eps2=%g", eps1, eps2));
  }
  for (double d : {Delta1(), Delta2()}) {
    if (!(d > 0 && d < 1)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("delta must lie in (0, 1), got %g", d));
    }
  }
  if (n1 < 1 || n2 < 1) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "both groups need users, have %d and %d", n1, n2));
  }
  ASSIGN_OR_RETURN(const int64_t mu1, Mu1());
  ASSIGN_OR_RETURN(const int64_t mu2, Mu2());
  if (n1 * mu2 != n2 * mu1) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "mixture weights differ: n1*mu2=%d != n2*mu1=%d (use "
        "MixtureParamsFromMu)",
        n1 * mu2, n2 * mu1));
  }
  if (public_coin) {
    if (compressed_size < 2 || compressed_size > k) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "compressed size must lie in [2, %d], got %d", k, compressed_size));
    }
    if (repetitions < 1 || repetitions % 2 == 0) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "repetitions must be a positive odd count, got %d", repetitions));
    }
    if (n1 / repetitions < 1) {
      return absl::FailedPreconditionError(
          "fewer users than repetitions");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<double> ShuffleStatistic(const ShuffleConfig& config,
                                        const Distribution& p,
                                        const Distribution& q, Rng& rng) {
  RETURN_IF_ERROR(config.Validate());
  RETURN_IF_ERROR(CheckPair(config, p, q));
  return config.public_coin ? PublicCoinStatistic(config, p, q, rng)
                            : PrivateCoinStatistic(config, p, q, rng);
}

absl::StatusOr<double> CalibrateShuffleThreshold(const ShuffleConfig& config,
                                                 const Distribution& null,
                                                 int trials, double quantile,
                                                 const Rng& rng) {
  if (trials < 1 || !(quantile > 0 && quantile < 1)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need trials >= 1 and quantile in (0, 1), got %d, %g", trials,
        quantile));
  }
  std::vector<double> values;
  values.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    Rng trial = rng.Fork(static_cast<uint64_t>(t));
    ASSIGN_OR_RETURN(const double z, ShuffleStatistic(config, null, null, trial));
    values.push_back(z);
  }
  std::sort(values.begin(), values.end());
  const int index = std::min(
      trials - 1, static_cast<int>(std::ceil(quantile * trials)) - 1);
  return values[std::max(index, 0)];
}

absl::StatusOr<TestVerdict> RunShufflePrivateCoin(const ShuffleConfig& config,
                                                  const Distribution& p,
                                                  const Distribution& q,
                                                  Rng& rng) {
  RETURN_IF_ERROR(config.Validate());
  RETURN_IF_ERROR(CheckPair(config, p, q));
  ASSIGN_OR_RETURN(const double threshold, RequireThreshold(config));
  ASSIGN_OR_RETURN(const double z, PrivateCoinStatistic(config, p, q, rng));
  return z <= threshold ? TestVerdict::kAccept : TestVerdict::kReject;
}

absl::StatusOr<TestVerdict> RunShufflePublicCoin(const ShuffleConfig& config,
                                                 const Distribution& p,
                                                 const Distribution& q,
                                                 Rng& rng) {
  RETURN_IF_ERROR(config.Validate());
  RETURN_IF_ERROR(CheckPair(config, p, q));
  if (!config.public_coin) {
    return absl::InvalidArgumentError("config is not marked public-coin");
  }
  ASSIGN_OR_RETURN(const double threshold, RequireThreshold(config));
  const TestProcedure once = [&](Rng& run_rng) -> absl::StatusOr<TestVerdict> {
    ASSIGN_OR_RETURN(const double z,
                     PublicCoinStatistic(config, p, q, run_rng));
    return z <= threshold ? TestVerdict::kAccept : TestVerdict::kReject;
  };
  return MajorityRepeat(once, config.repetitions, rng.Fork(0));
}

}  // namespace hetclose
