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

#include <cmath>
#include <numeric>
#include <vector>

#include "gtest/gtest.h"
#include "hetclose/distances.h"
#include "hetclose/distribution.h"
#include "hetclose/families.h"
#include "hetclose/majority.h"
#include "hetclose/rng.h"
#include "hetclose/sampling.h"

namespace hetclose {
namespace {

// Random pmf with Dirichlet(1) weights.
Distribution RandomPmf(int k, Rng& rng) {
  std::vector<double> w(k);
  double sum = 0;
  for (double& x : w) {
    x = -std::log(1.0 - rng.Uniform01());
    sum += x;
  }
  for (double& x : w) x /= sum;
  return *Distribution::Create(w);
}

TEST(DistributionTest, RejectsInvalidPmf) {
  EXPECT_FALSE(Distribution::Create({1.0}).ok());
  EXPECT_FALSE(Distribution::Create({0.5, 0.6}).ok());
  EXPECT_FALSE(Distribution::Create({1.2, -0.2}).ok());
  EXPECT_FALSE(Distribution::Create({0.5, 0.5 - 1e-9}).ok());
  EXPECT_TRUE(Distribution::Create({0.5, 0.5 - 1e-13}).ok());
}

TEST(PrivacyParamsTest, Validate) {
  EXPECT_TRUE((PrivacyParams{1.0, 0.0}).Validate(/*pure=*/true).ok());
  EXPECT_FALSE((PrivacyParams{0.0, 0.0}).Validate().ok());
  EXPECT_FALSE((PrivacyParams{1.0, 1.0}).Validate().ok());
  EXPECT_FALSE((PrivacyParams{1.0, 1e-6}).Validate(/*pure=*/true).ok());
  EXPECT_TRUE((PrivacyParams{1.0, 1e-6}).Validate().ok());
}

TEST(HistogramTest, TotalTracksCounts) {
  Histogram h = Histogram::FromSamples(std::vector<int32_t>{0, 2, 2, 1}, 3);
  EXPECT_EQ(h.total(), 4);
  EXPECT_EQ(h[2], 2);
  h.MoveUnit(2, 0);
  EXPECT_EQ(h[0], 2);
  EXPECT_EQ(h.total(), 4);
  h.Add(1, 3);
  EXPECT_EQ(h.total(), 7);
  const auto c = h.counts();
  EXPECT_EQ(std::accumulate(c.begin(), c.end(), int64_t{0}), h.total());
}

TEST(RngTest, SameSeedAndStreamReproduce) {
  Rng a(42, 7), b(42, 7), c(42, 8);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const uint64_t x = a.NextU64();
    EXPECT_EQ(x, b.NextU64());
    differs |= x != c.NextU64();
  }
  EXPECT_TRUE(differs);
}

TEST(RngTest, ForkDependsOnlyOnPath) {
  Rng a(3, 1);
  a.NextU64();
  Rng b(3, 1);
  EXPECT_EQ(a.Fork(5).NextU64(), b.Fork(5).NextU64());
  EXPECT_NE(a.Fork(5).NextU64(), a.Fork(6).NextU64());
}

TEST(SampleTest, PointMassIsConstant) {
  Rng rng(1, 0);
  const SampleSet s = Sample(Distribution::PointMass(4, 2), 5, rng);
  EXPECT_EQ(s.values, (std::vector<int32_t>{2, 2, 2, 2, 2}));
}

TEST(SampleTest, EmptyForZero) {
  Rng rng(1, 0);
  EXPECT_EQ(Sample(Distribution::Uniform(5), 0, rng).size(), 0u);
}

TEST(SampleTest, FairCoinBalance) {
  Rng rng(2024, 0);
  const SampleSet s = Sample(Distribution::Uniform(2), 1000000, rng);
  int64_t ones = 0;
  for (int32_t v : s.values) ones += v == 1;
  const double frac = ones / 1e6;
  EXPECT_GE(frac, 0.498);
  EXPECT_LE(frac, 0.502);
}

TEST(SampleTest, ValuesInRangeAndSourceTagged) {
  Rng rng(5, 0);
  const SampleSet s =
      Sample(Distribution::Uniform(7), 1000, rng, Group::kSecond);
  EXPECT_EQ(s.k, 7);
  EXPECT_EQ(s.source, Group::kSecond);
  for (int32_t v : s.values) {
    EXPECT_GE(v, 0);
    EXPECT_LT(v, 7);
  }
}

TEST(SampleTest, BitReproducible) {
  const Distribution p = *Distribution::Create({0.1, 0.2, 0.3, 0.4});
  Rng a(9, 9), b(9, 9);
  EXPECT_EQ(Sample(p, 1000, a).values, Sample(p, 1000, b).values);
}

TEST(SampleTest, EmpiricalFrequencies) {
  const Distribution p = *Distribution::Create({0.1, 0.2, 0.3, 0.4});
  Rng rng(11, 0);
  const int n = 200000;
  const Histogram h = Histogram::FromSamples(Sample(p, n, rng).values, 4);
  for (int i = 0; i < 4; ++i) {
    const double se = std::sqrt(p[i] * (1 - p[i]) / n);
    EXPECT_NEAR(h[i] / double(n), p[i], 5 * se);
  }
}

TEST(PoissonTest, ZeroMean) {
  Rng rng(1, 0);
  EXPECT_EQ(PoissonSampleCount(0, rng), 0);
}

void CheckPoissonMoments(double mean, double mean_tol, double var_tol) {
  Rng rng(77, static_cast<uint64_t>(mean * 10));
  const int draws = 100000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < draws; ++i) {
    const double x = static_cast<double>(SamplePoisson(mean, rng));
    sum += x;
    sum_sq += x * x;
  }
  const double m = sum / draws;
  const double v = sum_sq / draws - m * m;
  EXPECT_NEAR(m, mean, mean_tol) << "mean " << mean;
  EXPECT_NEAR(v, mean, var_tol) << "mean " << mean;
}

TEST(PoissonTest, MomentsAtThousand) { CheckPoissonMoments(1000, 10, 50); }

TEST(PoissonTest, MomentsBothBranches) {
  // 5 standard errors of the mean and of the sample variance.
  for (double mean : {0.3, 2.0, 9.5, 10.0, 37.0}) {
    const double se_mean = std::sqrt(mean / 1e5);
    const double se_var = std::sqrt((2 * mean * mean + mean) / 1e5);
    CheckPoissonMoments(mean, 5 * se_mean, 5 * se_var);
  }
}

TEST(PoissonTest, SmallMeanPmf) {
  // Exact pmf e^{-m} m^x / x! against empirical frequencies.
  const double mean = 3.0;
  Rng rng(8, 0);
  const int draws = 200000;
  std::vector<int> counts(20, 0);
  for (int i = 0; i < draws; ++i) {
    const int64_t x = SamplePoisson(mean, rng);
    if (x < 20) ++counts[x];
  }
  for (int x = 0; x < 10; ++x) {
    const double pmf = std::exp(-mean + x * std::log(mean) - std::lgamma(x + 1));
    EXPECT_NEAR(counts[x] / double(draws), pmf,
                5 * std::sqrt(pmf * (1 - pmf) / draws));
  }
}

TEST(TvDistanceTest, Examples) {
  const Distribution u = Distribution::Uniform(3);
  EXPECT_EQ(*TvDistance(u, u), 0.0);
  EXPECT_DOUBLE_EQ(
      *TvDistance(Distribution::PointMass(3, 0), Distribution::PointMass(3, 2)),
      1.0);
  EXPECT_NEAR(*TvDistance(*Distribution::Create({0.5, 0.5}),
                          *Distribution::Create({0.8, 0.2})),
              0.3, 1e-15);
  EXPECT_FALSE(TvDistance(Distribution::Uniform(2), u).ok());
}

TEST(TvDistanceTest, MetricOnRandomTriples) {
  Rng rng(31, 0);
  for (int t = 0; t < 200; ++t) {
    const int k = 2 + static_cast<int>(rng.UniformInt(20));
    const Distribution a = RandomPmf(k, rng), b = RandomPmf(k, rng),
                       c = RandomPmf(k, rng);
    const double ab = *TvDistance(a, b), ba = *TvDistance(b, a);
    EXPECT_EQ(ab, ba);
    EXPECT_GT(ab, 0);
    EXPECT_LE(ab, 1);
    EXPECT_EQ(*TvDistance(a, a), 0.0);
    EXPECT_LE(ab, *TvDistance(a, c) + *TvDistance(c, b) + 1e-15);
  }
}

TEST(L2DistanceTest, Examples) {
  const std::vector<double> u{1, 0}, v{0, 1};
  EXPECT_EQ(*L2DistanceSq(u, u), 0.0);
  EXPECT_EQ(*L2DistanceSq(u, v), 2.0);
  EXPECT_NEAR(*L2DistanceSq(std::vector<double>{0.3, 0.7},
                            std::vector<double>{0.1, 0.9}),
              0.08, 1e-15);
  EXPECT_FALSE(L2DistanceSq(u, std::vector<double>{1}).ok());
}

TEST(L2DistanceTest, CauchySchwarzAgainstL1) {
  Rng rng(12, 0);
  for (int t = 0; t < 200; ++t) {
    const int k = 2 + static_cast<int>(rng.UniformInt(40));
    const Distribution p = RandomPmf(k, rng), q = RandomPmf(k, rng);
    const double l1 = 2 * *TvDistance(p, q);
    const double l2 = std::sqrt(*L2DistanceSq(p.pmf(), q.pmf()));
    EXPECT_GE(std::sqrt(double(k)) * l2, l1 - 1e-12);
  }
}

TEST(FamilyTest, Uniform) {
  const auto pair = *MakeFamily(FamilyKind::kUniform, 4, 0.3);
  EXPECT_EQ(*TvDistance(pair.first, pair.second), 0.0);
}

TEST(FamilyTest, PaninskiFarExample) {
  const auto pair = *MakeFamily(FamilyKind::kPaninskiFar, 4, 0.5);
  EXPECT_EQ(pair.first, Distribution::Uniform(4));
  const std::vector<double> q(pair.second.pmf().begin(),
                              pair.second.pmf().end());
  EXPECT_EQ(q, (std::vector<double>{0.5, 0, 0.5, 0}));
  EXPECT_NEAR(*TvDistance(pair.first, pair.second), 0.5, 1e-12);
}

TEST(FamilyTest, TwoSpikeExample) {
  const auto pair = *MakeFamily(FamilyKind::kTwoSpike, 10, 0.3);
  EXPECT_NEAR(*TvDistance(pair.first, pair.second), 0.3, 1e-12);
}

TEST(FamilyTest, FarFamiliesHitAlphaExactly) {
  for (FamilyKind kind :
       {FamilyKind::kPaninskiFar, FamilyKind::kZipf, FamilyKind::kTwoSpike}) {
    for (int k : {2, 4, 8, 16, 20, 64}) {
      for (double alpha : {0.05, 0.25, 0.5}) {
        const auto pair = MakeFamily(kind, k, alpha);
        ASSERT_TRUE(pair.ok()) << FamilyName(kind) << " k=" << k;
        EXPECT_NEAR(*TvDistance(pair->first, pair->second), alpha, 1e-12)
            << FamilyName(kind) << " k=" << k << " alpha=" << alpha;
      }
    }
  }
}

TEST(FamilyTest, InvalidCombinations) {
  EXPECT_FALSE(MakeFamily(FamilyKind::kPaninskiFar, 5, 0.25).ok());
  EXPECT_FALSE(MakeFamily(FamilyKind::kPaninskiFar, 4, 0.75).ok());
  EXPECT_FALSE(MakeFamily(FamilyKind::kTwoSpike, 1, 0.25).ok());
  EXPECT_FALSE(MakeFamily(FamilyKind::kTwoSpike, 4, 0).ok());
}

TEST(FamilyTest, NamesRoundTrip) {
  for (FamilyKind kind : {FamilyKind::kUniform, FamilyKind::kPaninskiFar,
                          FamilyKind::kZipf, FamilyKind::kTwoSpike}) {
    EXPECT_EQ(*ParseFamily(FamilyName(kind)), kind);
  }
  EXPECT_FALSE(ParseFamily("gaussian").ok());
}

TestProcedure Biased(double accept_prob) {
  return [accept_prob](Rng& rng) -> absl::StatusOr<TestVerdict> {
    return rng.Bernoulli(accept_prob) ? TestVerdict::kAccept
                                      : TestVerdict::kReject;
  };
}

TEST(MajorityTest, SingleRunIsThatRun) {
  const Rng rng(4, 0);
  for (int i = 0; i < 20; ++i) {
    const Rng base = rng.Fork(i);
    Rng single = base.Fork(0);
    const TestVerdict expected = *Biased(0.5)(single);
    EXPECT_EQ(*MajorityRepeat(Biased(0.5), 1, base), expected);
  }
}

TEST(MajorityTest, AlwaysAccept) {
  EXPECT_EQ(*MajorityRepeat(Biased(1.0), 7, Rng(1, 0)), TestVerdict::kAccept);
}

TEST(MajorityTest, RejectsEvenCount) {
  EXPECT_FALSE(MajorityRepeat(Biased(1.0), 4, Rng(1, 0)).ok());
}

TEST(MajorityTest, ErrorDecaysAtThirtyOne) {
  // Exact binomial tail P[Bin(31, 1/3) >= 16].
  double tail = 0;
  for (int j = 16; j <= 31; ++j) {
    tail += std::exp(std::lgamma(32) - std::lgamma(j + 1) -
                     std::lgamma(32 - j) + j * std::log(1.0 / 3) +
                     (31 - j) * std::log(2.0 / 3));
  }
  ASSERT_LE(tail, 0.05);
  const Rng rng(99, 0);
  const int meta = 10000;
  int errors = 0;
  for (int t = 0; t < meta; ++t) {
    errors += *MajorityRepeat(Biased(2.0 / 3), 31, rng.Fork(t)) ==
              TestVerdict::kReject;
  }
  EXPECT_LE(errors / double(meta), 0.05);
  EXPECT_NEAR(errors / double(meta), tail,
              4 * std::sqrt(tail * (1 - tail) / meta));
}

}  // namespace
}  // namespace hetclose
