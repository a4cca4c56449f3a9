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

#include "hetclose/central_dp.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <span>
#include <vector>

#include "absl/strings/str_format.h"
#include "hetclose/sampling.h"
#include "hetclose/status_macros.h"

namespace hetclose {
namespace {

int64_t BinTerm(int64_t x, int64_t xp, int64_t y, int64_t yp) {
  return std::llabs(x - y) + std::llabs(xp - yp) - std::llabs(x - xp) -
         std::llabs(y - yp);
}

int64_t Evaluate(const std::vector<std::vector<int64_t>>& h) {
  int64_t z = 0;
  for (size_t i = 0; i < h[0].size(); ++i) {
    z += BinTerm(h[0][i], h[1][i], h[2][i], h[3][i]);
  }
  return z;
}

absl::StatusOr<std::vector<std::vector<int64_t>>> Collect(
    const Histogram& x, const Histogram& x_prime, const Histogram& y,
    const Histogram& y_prime) {
  const int k = x.k();
  if (x_prime.k() != k || y.k() != k || y_prime.k() != k) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "histograms disagree on k: %d, %d, %d, %d", x.k(), x_prime.k(), y.k(),
        y_prime.k()));
  }
  std::vector<std::vector<int64_t>> h;
  for (const Histogram* hist : {&x, &x_prime, &y, &y_prime}) {
    h.emplace_back(hist->counts().begin(), hist->counts().end());
  }
  return h;
}

std::pair<Histogram, Histogram> SplitHalves(std::span<const int32_t> values,
                                            int k) {
  const size_t half = values.size() / 2;
  return {Histogram::FromSamples(values.subspan(0, half), k),
          Histogram::FromSamples(values.subspan(half, half), k)};
}

}  // namespace

absl::StatusOr<int64_t> CentralStatistic(const Histogram& x,
                                         const Histogram& x_prime,
                                         const Histogram& y,
                                         const Histogram& y_prime) {
  ASSIGN_OR_RETURN(auto h, Collect(x, x_prime, y, y_prime));
  return Evaluate(h);
}

absl::StatusOr<int64_t> SensitivityCheck(const Histogram& x,
                                         const Histogram& x_prime,
                                         const Histogram& y,
                                         const Histogram& y_prime) {
  ASSIGN_OR_RETURN(auto h, Collect(x, x_prime, y, y_prime));
  const int64_t base = Evaluate(h);
  const int k = x.k();
  int64_t worst = 0;
  for (auto& hist : h) {
    for (int from = 0; from < k; ++from) {
      if (hist[from] == 0) continue;
      for (int to = 0; to < k; ++to) {
        if (to == from) continue;
        --hist[from];
        ++hist[to];
        worst = std::max<int64_t>(worst, std::llabs(Evaluate(h) - base));
        ++hist[from];
        --hist[to];
      }
    }
  }
  return worst;
}

absl::StatusOr<int64_t> AddRemoveSensitivity(const Histogram& x,
                                             const Histogram& x_prime,
                                             const Histogram& y,
                                             const Histogram& y_prime) {
  ASSIGN_OR_RETURN(auto h, Collect(x, x_prime, y, y_prime));
  const int64_t base = Evaluate(h);
  int64_t worst = 0;
  for (auto& hist : h) {
    for (size_t bin = 0; bin < hist.size(); ++bin) {
      for (int delta : {+1, -1}) {
        if (hist[bin] + delta < 0) continue;
        hist[bin] += delta;
        worst = std::max<int64_t>(worst, std::llabs(Evaluate(h) - base));
        hist[bin] -= delta;
      }
    }
  }
  return worst;
}

double Logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

CentralStatisticValue ShiftStatistic(int64_t z, int64_t n, double epsilon,
                                     double c1, double c2,
                                     double sensitivity) {
  const double shifted =
      (static_cast<double>(z) - c1 * std::sqrt(static_cast<double>(n)) -
       c2 / epsilon) /
      sensitivity;
  return CentralStatisticValue{.z = z,
                               .z_shifted = shifted,
                               .reject_prob = Logistic(epsilon * shifted)};
}

TestVerdict PrivatizedVerdict(int64_t z, int64_t n, double epsilon, double c1,
                              double c2, Rng& rng, double sensitivity) {
  const CentralStatisticValue value =
      ShiftStatistic(z, n, epsilon, c1, c2, sensitivity);
  return rng.Bernoulli(value.reject_prob) ? TestVerdict::kReject
                                          : TestVerdict::kAccept;
}

absl::StatusOr<SampleSet> Subsample(const SampleSet& samples, int64_t m,
                                    Rng& rng) {
  const int64_t n = static_cast<int64_t>(samples.size());
  if (m < 0 || m > n) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "cannot subsample %d of %d records", m, n));
  }
  std::vector<int32_t> pool = samples.values;
  // Partial Fisher-Yates: the first m slots become a uniform m-subset.
  for (int64_t i = 0; i < m; ++i) {
    const int64_t j = i + static_cast<int64_t>(rng.UniformInt(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(m);
  return SampleSet{.k = samples.k, .source = samples.source,
                   .values = std::move(pool)};
}

absl::StatusOr<double> AmplifiedEpsilon(double eps1, int64_t n1, int64_t n2) {
  if (!(eps1 > 0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("eps1 must be positive, got %g", eps1));
  }
  if (n1 < 1 || n1 > n2) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need 1 <= n1 <= n2, got n1=%d n2=%d", n1, n2));
  }
  if (n1 == n2) return eps1;
  const double rate = static_cast<double>(n1) / static_cast<double>(n2);
  return std::log1p(rate * std::expm1(eps1));
}

absl::StatusOr<double> AmplifiedDelta(double delta1, int64_t n1, int64_t n2) {
  if (!(delta1 >= 0 && delta1 < 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in [0, 1), got %g", delta1));
  }
  if (n1 < 1 || n1 > n2) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need 1 <= n1 <= n2, got n1=%d n2=%d", n1, n2));
  }
  return static_cast<double>(n1) / static_cast<double>(n2) * delta1;
}

absl::StatusOr<int64_t> MinimalGroupTwoCount(double eps1, double eps2,
                                             int64_t n1) {
  if (!(eps2 > 0) || eps2 > eps1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need 0 < eps2 <= eps1, got eps1=%g eps2=%g", eps1, eps2));
  }
  if (n1 < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("n1 must be positive, got %d", n1));
  }
  int64_t n2 = std::max<int64_t>(
      n1, static_cast<int64_t>(std::ceil(static_cast<double>(n1) *
                                         std::expm1(eps1) / std::expm1(eps2))));
  // Guard the closed form against rounding in either direction.
  while (true) {
    ASSIGN_OR_RETURN(const double amplified, AmplifiedEpsilon(eps1, n1, n2));
    if (amplified <= eps2) break;
    ++n2;
  }
  while (n2 > n1) {
    ASSIGN_OR_RETURN(const double amplified,
                     AmplifiedEpsilon(eps1, n1, n2 - 1));
    if (amplified > eps2) break;
    --n2;
  }
  return n2;
}

absl::Status CentralConfig::Validate() const {
  if (k < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("k must be at least 2, got %d", k));
  }
  if (!(alpha > 0 && alpha <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must lie in (0, 1], got %g", alpha));
  }
  if (!(eps2 > 0) || eps2 > eps1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need 0 < eps2 <= eps1, got eps1=%g eps2=%g", eps1, eps2));
  }
  if (!(sensitivity > 0)) {
    return absl::InvalidArgumentError("sensitivity must be positive");
  }
  if (n1 < 2 || n2 < n1) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "need 2 <= n1 <= n2, got n1=%d n2=%d", n1, n2));
  }
  ASSIGN_OR_RETURN(const double amplified, AmplifiedEpsilon(eps1, n1, n2));
  if (amplified > eps2) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "subsampling %d of %d records only gives eps=%.6f > eps2=%g", n1, n2,
        amplified, eps2));
  }
  return absl::OkStatus();
}

absl::StatusOr<int64_t> CentralRawStatistic(const CentralConfig& config,
                                            const Distribution& p,
                                            const Distribution& q, Rng& rng) {
  RETURN_IF_ERROR(config.Validate());
  if (p.k() != config.k || q.k() != config.k) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "config is over k=%d but distributions are over %d and %d", config.k,
        p.k(), q.k()));
  }
  Rng sample_rng = rng.Fork(0);
  const SampleSet group1 = Sample(p, config.n1, sample_rng, Group::kFirst);
  const SampleSet collected = Sample(q, config.n2, sample_rng, Group::kSecond);
  Rng subsample_rng = rng.Fork(1);
  ASSIGN_OR_RETURN(SampleSet group2,
                   Subsample(collected, config.n1, subsample_rng));
  auto [x, x_prime] = SplitHalves(group1.values, config.k);
  auto [y, y_prime] = SplitHalves(group2.values, config.k);
  return CentralStatistic(x, x_prime, y, y_prime);
}

absl::StatusOr<TestVerdict> RunCentral(const CentralConfig& config,
                                       const Distribution& p,
                                       const Distribution& q, Rng& rng) {
  ASSIGN_OR_RETURN(const int64_t z, CentralRawStatistic(config, p, q, rng));
  Rng release_rng = rng.Fork(2);
  return PrivatizedVerdict(z, config.n1, config.eps1, config.c1, config.c2,
                           release_rng, config.sensitivity);
}

absl::StatusOr<CentralConstants> CalibrateCentralConstants(
    const CentralConfig& config, const Distribution& null, int trials,
    double c1_quantile, double target_reject, const Rng& rng) {
  if (trials < 1 || !(c1_quantile > 0 && c1_quantile < 1) ||
      !(target_reject > 0 && target_reject < 1)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need trials >= 1 and quantile, target in (0, 1); got %d, %g, %g",
        trials, c1_quantile, target_reject));
  }
  std::vector<int64_t> zs;
  zs.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    Rng trial = rng.Fork(static_cast<uint64_t>(t));
    ASSIGN_OR_RETURN(const int64_t z,
                     CentralRawStatistic(config, null, null, trial));
    zs.push_back(z);
  }
  const double root_n = std::sqrt(static_cast<double>(config.n1));
  std::vector<double> scaled(zs.size());
  std::transform(zs.begin(), zs.end(), scaled.begin(),
                 [&](int64_t z) { return static_cast<double>(z) / root_n; });
  std::sort(scaled.begin(), scaled.end());
  const int index = std::clamp(
      static_cast<int>(std::ceil(c1_quantile * trials)) - 1, 0, trials - 1);
  const double c1 = scaled[index];

  const auto mean_reject = [&](double c2) {
    double total = 0;
    for (int64_t z : zs) {
      total += ShiftStatistic(z, config.n1, config.eps1, c1, c2,
                              config.sensitivity)
                   .reject_prob;
    }
    return total / trials;
  };
  // mean_reject is decreasing in c2; bracket then bisect.
  double lo = 0;
  double hi = 1;
  if (mean_reject(lo) <= target_reject) {
    return CentralConstants{
        .c1 = c1, .c2 = 0, .null_reject_prob = mean_reject(0)};
  }
  while (mean_reject(hi) > target_reject) hi *= 2;
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    (mean_reject(mid) > target_reject ? lo : hi) = mid;
  }
  return CentralConstants{
      .c1 = c1, .c2 = hi, .null_reject_prob = mean_reject(hi)};
}

}  // namespace hetclose
