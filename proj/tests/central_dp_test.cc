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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "gtest/gtest.h"
#include "hetclose/central_dp.h"
#include "hetclose/families.h"
#include "hetclose/rng.h"
#include "hetclose/sampling.h"

namespace hetclose {
namespace {

// Direct evaluation of the four-histogram statistic.
int64_t BruteZ(const std::vector<std::vector<int64_t>>& h) {
  int64_t z = 0;
  for (size_t i = 0; i < h[0].size(); ++i) {
    z += std::llabs(h[0][i] - h[2][i]) + std::llabs(h[1][i] - h[3][i]) -
         std::llabs(h[0][i] - h[1][i]) - std::llabs(h[2][i] - h[3][i]);
  }
  return z;
}

int64_t Z(const std::vector<std::vector<int64_t>>& h) {
  return *CentralStatistic(Histogram(h[0]), Histogram(h[1]), Histogram(h[2]),
                           Histogram(h[3]));
}

// Four random histograms over k bins with totals at most n.
std::vector<std::vector<int64_t>> RandomInstance(int k, int n, Rng& rng) {
  std::vector<std::vector<int64_t>> h(4, std::vector<int64_t>(k, 0));
  for (auto& hist : h) {
    const int total = static_cast<int>(rng.UniformInt(n + 1));
    for (int s = 0; s < total; ++s) ++hist[rng.UniformInt(k)];
  }
  return h;
}

// Largest |Z change| over every single-unit move, by recomputation.
int64_t BruteMoveSensitivity(std::vector<std::vector<int64_t>> h) {
  const int64_t base = BruteZ(h);
  int64_t worst = 0;
  const size_t k = h[0].size();
  for (auto& hist : h) {
    for (size_t a = 0; a < k; ++a) {
      if (hist[a] == 0) continue;
      for (size_t b = 0; b < k; ++b) {
        if (a == b) continue;
        --hist[a];
        ++hist[b];
        worst = std::max<int64_t>(worst, std::llabs(BruteZ(h) - base));
        ++hist[a];
        --hist[b];
      }
    }
  }
  return worst;
}

TEST(CentralStatisticTest, Examples) {
  EXPECT_EQ(Z({{3, 1}, {1, 3}, {2, 2}, {2, 2}}), 0);
  EXPECT_EQ(Z({{4, 0, 2}, {4, 0, 2}, {4, 0, 2}, {4, 0, 2}}), 0);
  EXPECT_EQ(Z({{5, 1}, {5, 1}, {2, 3}, {2, 3}}), 2 * (3 + 2));
  EXPECT_FALSE(CentralStatistic(Histogram({1, 2}), Histogram({1}),
                                Histogram({1, 2}), Histogram({1, 2}))
                   .ok());
}

TEST(CentralStatisticTest, MatchesBruteForce) {
  Rng rng(1, 0);
  for (int t = 0; t < 500; ++t) {
    const auto h = RandomInstance(2 + static_cast<int>(rng.UniformInt(9)), 20,
                                  rng);
    EXPECT_EQ(Z(h), BruteZ(h));
  }
}

TEST(SensitivityTest, MatchesBruteForceAndNeverExceedsFour) {
  Rng rng(2, 0);
  int64_t worst = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto h =
        RandomInstance(2 + static_cast<int>(rng.UniformInt(9)), 20, rng);
    const int64_t s = *SensitivityCheck(Histogram(h[0]), Histogram(h[1]),
                                        Histogram(h[2]), Histogram(h[3]));
    EXPECT_EQ(s, BruteMoveSensitivity(h));
    EXPECT_LE(s, 4);
    worst = std::max(worst, s);
  }
  EXPECT_EQ(worst, 4);
}

TEST(SensitivityTest, MoveReachingFour) {
  // One sample of X moves from bin 0 to bin 1: Z goes from 0 to 4.
  const std::vector<std::vector<int64_t>> before{{1, 0}, {0, 1}, {1, 0}, {1, 0}};
  const std::vector<std::vector<int64_t>> after{{0, 1}, {0, 1}, {1, 0}, {1, 0}};
  EXPECT_EQ(BruteZ(before), 0);
  EXPECT_EQ(BruteZ(after), 4);
  EXPECT_EQ(*SensitivityCheck(Histogram(before[0]), Histogram(before[1]),
                              Histogram(before[2]), Histogram(before[3])),
            4);
}

TEST(SensitivityTest, SingleUnitAtTwoBins) {
  const Histogram x({1, 0}), zero({0, 0});
  EXPECT_LE(*SensitivityCheck(x, zero, zero, zero), 2);
}

TEST(SensitivityTest, AllEqualHistograms) {
  const Histogram h({2, 1, 3});
  const int64_t s = *SensitivityCheck(h, h, h, h);
  EXPECT_GE(s, 0);
  EXPECT_LE(s, 2);
}

TEST(SensitivityTest, AddRemoveIsAtMostTwo) {
  Rng rng(3, 0);
  for (int t = 0; t < 1000; ++t) {
    const auto h =
        RandomInstance(2 + static_cast<int>(rng.UniformInt(9)), 20, rng);
    EXPECT_LE(*AddRemoveSensitivity(Histogram(h[0]), Histogram(h[1]),
                                    Histogram(h[2]), Histogram(h[3])),
              2);
  }
}

TEST(LogisticTest, Values) {
  EXPECT_EQ(Logistic(0), 0.5);
  EXPECT_NEAR(Logistic(10), 0.9999546021312976, 1e-16);
  EXPECT_NEAR(Logistic(-10), 1 - 0.9999546021312976, 1e-16);
  EXPECT_EQ(Logistic(-1000), 0.0);
  EXPECT_EQ(Logistic(1000), 1.0);
}

TEST(ShiftStatisticTest, Examples) {
  const int64_t n = 400;
  const double eps = 0.8, c1 = 1.5, c2 = 2.0;
  const double center = c1 * 20 + c2 / eps;
  // z' = 0 at an integer center.
  EXPECT_NEAR(ShiftStatistic(0, n, eps, 0, 0).reject_prob, 0.5, 1e-15);
  // 20/eps above the center with divisor 2.
  const double z = center + 20 / eps;
  EXPECT_NEAR(
      Logistic(eps * (z - center) / 2), 0.9999546021312976, 1e-15);
  const CentralStatisticValue a = ShiftStatistic(32, n, eps, c1, c2);
  const CentralStatisticValue b = ShiftStatistic(34, n, eps, c1, c2);
  const auto logit = [](double p) { return std::log(p / (1 - p)); };
  EXPECT_NEAR(logit(b.reject_prob) - logit(a.reject_prob), eps, 1e-9);
  const CentralStatisticValue c = ShiftStatistic(36, n, eps, c1, c2, 4.0);
  EXPECT_NEAR(logit(c.reject_prob) -
                  logit(ShiftStatistic(32, n, eps, c1, c2, 4.0).reject_prob),
              eps, 1e-9);
}

TEST(PrivatizedVerdictTest, RejectFrequencyMatchesProbability) {
  const int64_t z = 130, n = 100;
  const double eps = 1, c1 = 10, c2 = 20;
  const double p = ShiftStatistic(z, n, eps, c1, c2).reject_prob;
  const Rng base(4, 0);
  const int trials = 20000;
  int rejects = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = base.Fork(t);
    rejects += PrivatizedVerdict(z, n, eps, c1, c2, rng) == TestVerdict::kReject;
  }
  EXPECT_NEAR(rejects / double(trials), p, 5 * std::sqrt(p * (1 - p) / trials));
}

TEST(PrivatizedVerdictTest, NeighbourRatioWithinExpEpsilon) {
  Rng rng(5, 0);
  const double eps = 1.0;
  for (int t = 0; t < 1000; ++t) {
    auto h = RandomInstance(2 + static_cast<int>(rng.UniformInt(9)), 20, rng);
    const int which = static_cast<int>(rng.UniformInt(4));
    auto& hist = h[which];
    const int k = static_cast<int>(hist.size());
    int from = static_cast<int>(rng.UniformInt(k));
    if (hist[from] == 0) continue;
    int to = static_cast<int>(rng.UniformInt(k - 1));
    if (to >= from) ++to;
    const int64_t z0 = BruteZ(h);
    --hist[from];
    ++hist[to];
    const int64_t z1 = BruteZ(h);
    const double c1 = rng.Uniform01() * 3, c2 = rng.Uniform01() * 5;
    for (int s : {0, 1}) {
      const double p0 = s == 0 ? ShiftStatistic(z0, 40, eps, c1, c2, 4.0).reject_prob
                               : 1 - ShiftStatistic(z0, 40, eps, c1, c2, 4.0).reject_prob;
      const double p1 = s == 0 ? ShiftStatistic(z1, 40, eps, c1, c2, 4.0).reject_prob
                               : 1 - ShiftStatistic(z1, 40, eps, c1, c2, 4.0).reject_prob;
      EXPECT_LE(p0 / p1, std::exp(eps) * (1 + 1e-12));
      EXPECT_LE(p1 / p0, std::exp(eps) * (1 + 1e-12));
    }
  }
}

TEST(SubsampleTest, Boundaries) {
  Rng rng(6, 0);
  const SampleSet s = Sample(Distribution::Uniform(5), 50, rng);
  SampleSet all = *Subsample(s, 50, rng);
  std::vector<int32_t> a = s.values, b = all.values;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
  EXPECT_EQ(Subsample(s, 0, rng)->size(), 0u);
  EXPECT_FALSE(Subsample(s, 51, rng).ok());
}

TEST(SubsampleTest, MarginalInclusion) {
  const int n = 20, m = 7, draws = 10000;
  SampleSet s{.k = n, .source = Group::kSecond, .values = {}};
  for (int i = 0; i < n; ++i) s.values.push_back(i);
  Rng rng(7, 0);
  std::vector<int> included(n, 0);
  for (int t = 0; t < draws; ++t) {
    const SampleSet sub = *Subsample(s, m, rng);
    std::vector<int32_t> seen = sub.values;
    std::sort(seen.begin(), seen.end());
    EXPECT_EQ(std::unique(seen.begin(), seen.end()), seen.end());
    for (int32_t v : sub.values) ++included[v];
  }
  const double p = double(m) / n;
  for (int i = 0; i < n; ++i) {
    EXPECT_NEAR(included[i] / double(draws), p,
                3.5 * std::sqrt(p * (1 - p) / draws));
  }
}

TEST(AmplificationTest, Examples) {
  EXPECT_EQ(*AmplifiedEpsilon(0.7, 30, 30), 0.7);
  EXPECT_NEAR(*AmplifiedEpsilon(1, 500, 1000), 0.6201145069582775, 1e-15);
  EXPECT_NEAR(*AmplifiedEpsilon(1, 37, 74), std::log(1 + 0.5 * (M_E - 1)),
              1e-12);
  EXPECT_FALSE(AmplifiedEpsilon(1, 10, 5).ok());
  EXPECT_NEAR(*AmplifiedDelta(1e-6, 10, 40), 2.5e-7, 1e-20);
}

TEST(AmplificationTest, GridBoundsAndMonotonicity) {
  for (double eps = 0.05; eps <= 1.0 + 1e-9; eps += 0.05) {
    double previous = 0;
    for (int64_t n1 = 1; n1 <= 100; ++n1) {
      const double a = *AmplifiedEpsilon(eps, n1, 100);
      EXPECT_LE(a, 2 * (n1 / 100.0) * eps);
      EXPECT_LE(a, eps + 1e-15);
      EXPECT_GT(a, previous);
      previous = a;
    }
  }
}

TEST(MinimalGroupTwoCountTest, BoundaryRatio) {
  const int64_t n1 = 100000;
  const int64_t n2 = *MinimalGroupTwoCount(1, 0.5, n1);
  EXPECT_NEAR(double(n2) / n1, 2.6487, 1e-4);
  EXPECT_LE(*AmplifiedEpsilon(1, n1, n2), 0.5);
  EXPECT_GT(*AmplifiedEpsilon(1, n1, n2 - 1), 0.5);
  EXPECT_EQ(*MinimalGroupTwoCount(0.6, 0.6, 77), 77);
  EXPECT_FALSE(MinimalGroupTwoCount(0.5, 1, 10).ok());
}

CentralConfig TestConfig(int64_t n1) {
  return CentralConfig{.k = 20, .alpha = 0.5, .eps1 = 1, .eps2 = 0.5,
                       .n1 = n1, .n2 = *MinimalGroupTwoCount(1, 0.5, n1)};
}

TEST(CentralConfigTest, Validate) {
  EXPECT_TRUE(TestConfig(100).Validate().ok());
  CentralConfig c = TestConfig(100);
  --c.n2;
  EXPECT_TRUE(absl::IsFailedPrecondition(c.Validate()));
  c = TestConfig(100);
  c.eps2 = 2;
  EXPECT_TRUE(absl::IsInvalidArgument(c.Validate()));
  c = TestConfig(100);
  c.sensitivity = 0;
  EXPECT_TRUE(absl::IsInvalidArgument(c.Validate()));
}

TEST(CentralRunTest, ReproducibleAndUsesSubsample) {
  const CentralConfig c = TestConfig(60);
  const Distribution u = Distribution::Uniform(20);
  Rng a(8, 8), b(8, 8);
  EXPECT_EQ(*CentralRawStatistic(c, u, u, a), *CentralRawStatistic(c, u, u, b));
}

TEST(CentralCalibrationTest, ConstantsMeetTargetAndBoundMedian) {
  const CentralConfig c = TestConfig(200);
  const Distribution u = Distribution::Uniform(20);
  const CentralConstants k =
      *CalibrateCentralConstants(c, u, 1000, 0.9, 1.0 / 3, Rng(9, 0));
  EXPECT_LE(k.null_reject_prob, 1.0 / 3 + 1e-9);
  EXPECT_GE(k.c2, 0);
  // Median of Z / sqrt(n) under the null on fresh draws is below c1.
  std::vector<double> scaled;
  const Rng fresh(10, 0);
  for (int t = 0; t < 2000; ++t) {
    Rng rng = fresh.Fork(t);
    scaled.push_back(*CentralRawStatistic(c, u, u, rng) / std::sqrt(200.0));
  }
  std::nth_element(scaled.begin(), scaled.begin() + 1000, scaled.end());
  EXPECT_LE(scaled[1000], k.c1);
}

TEST(CentralCalibrationTest, Deterministic) {
  const CentralConfig c = TestConfig(100);
  const Distribution u = Distribution::Uniform(20);
  const CentralConstants a =
      *CalibrateCentralConstants(c, u, 300, 0.9, 0.2, Rng(11, 0));
  const CentralConstants b =
      *CalibrateCentralConstants(c, u, 300, 0.9, 0.2, Rng(11, 0));
  EXPECT_EQ(a.c1, b.c1);
  EXPECT_EQ(a.c2, b.c2);
}

}  // namespace
}  // namespace hetclose
