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
#include <vector>

#include "gtest/gtest.h"
#include "hetclose/distances.h"
#include "hetclose/domain_compression.h"
#include "hetclose/families.h"
#include "hetclose/rng.h"
#include "hetclose/sampling.h"

namespace hetclose {
namespace {

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

TEST(PartitionTest, CreateValidates) {
  EXPECT_TRUE(Partition::Create(2, {0, 1, 1, 0}).ok());
  EXPECT_FALSE(Partition::Create(1, {0, 0}).ok());
  EXPECT_FALSE(Partition::Create(5, {0, 1, 2, 3}).ok());
  EXPECT_FALSE(Partition::Create(2, {0, 2, 1}).ok());
  EXPECT_FALSE(Partition::Create(2, {0, -1, 1}).ok());
}

TEST(PartitionTest, JsonRoundTrip) {
  const Partition p = *Partition::Create(3, {2, 0, 1, 1, 0});
  const Partition back = *Partition::FromJson(p.ToJson(), 3);
  EXPECT_EQ(back.assignment(), p.assignment());
  EXPECT_FALSE(Partition::FromJson("{\"a\": 1}", 3).ok());
  EXPECT_FALSE(Partition::FromJson("[0, 1.5]", 2).ok());
}

TEST(RandomPartitionTest, RangeErrors) {
  Rng rng(1, 0);
  EXPECT_FALSE(RandomPartition(5, 1, rng).ok());
  EXPECT_FALSE(RandomPartition(5, 6, rng).ok());
  EXPECT_TRUE(RandomPartition(5, 5, rng).ok());
}

TEST(RandomPartitionTest, Deterministic) {
  Rng a(7, 1), b(7, 1);
  EXPECT_EQ(RandomPartition(30, 4, a)->assignment(),
            RandomPartition(30, 4, b)->assignment());
}

TEST(RandomPartitionTest, SingletonOccupancy) {
  const int k = 10;
  const int trials = 20000;
  const double expected = k * std::pow(1 - 1.0 / k, k - 1);
  Rng rng(3, 0);
  double sum = 0, sum_sq = 0;
  for (int t = 0; t < trials; ++t) {
    const Partition p = *RandomPartition(k, k, rng);
    std::vector<int> sizes(k, 0);
    for (int x = 0; x < k; ++x) ++sizes[p.PartOf(x)];
    int singletons = 0;
    for (int s : sizes) singletons += s == 1;
    sum += singletons;
    sum_sq += double(singletons) * singletons;
  }
  const double mean = sum / trials;
  const double se = std::sqrt((sum_sq / trials - mean * mean) / trials);
  EXPECT_NEAR(mean, expected, 4 * se);
}

TEST(RandomPartitionTest, TwoPartsAreFairCoins) {
  const int k = 1000;
  const int trials = 50;
  Rng rng(5, 0);
  int ones = 0;
  for (int t = 0; t < trials; ++t) {
    const Partition p = *RandomPartition(k, 2, rng);
    for (int x = 0; x < k; ++x) ones += p.PartOf(x);
  }
  const double n = double(k) * trials;
  EXPECT_NEAR(ones / n, 0.5, 3 * std::sqrt(0.25 / n));
}

TEST(InduceTest, HandExample) {
  const Distribution p = *Distribution::Create({0.4, 0.1, 0.1, 0.4});
  const Partition pi = *Partition::Create(2, {0, 0, 1, 1});
  const Distribution induced = *Induce(p, pi);
  EXPECT_NEAR(induced[0], 0.5, 1e-15);
  EXPECT_NEAR(induced[1], 0.5, 1e-15);
  EXPECT_FALSE(Induce(Distribution::Uniform(3), pi).ok());
}

TEST(InduceTest, EqualityPreservedAndMassConserved) {
  Rng rng(9, 0);
  for (int t = 0; t < 200; ++t) {
    const int k = 2 + static_cast<int>(rng.UniformInt(30));
    const int parts = 2 + static_cast<int>(rng.UniformInt(k - 1));
    const Partition pi = *RandomPartition(k, parts, rng);
    const Distribution p = RandomPmf(k, rng);
    const Distribution a = *Induce(p, pi), b = *Induce(p, pi);
    EXPECT_EQ(*TvDistance(a, b), 0.0);
    double total = 0;
    for (double v : a.pmf()) total += v;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(InduceTest, PushforwardIsLinear) {
  Rng rng(10, 0);
  for (int t = 0; t < 100; ++t) {
    const int k = 2 + static_cast<int>(rng.UniformInt(20));
    const Partition pi = *RandomPartition(k, 2, rng);
    const Distribution p = RandomPmf(k, rng), r = RandomPmf(k, rng);
    const double lambda = rng.Uniform01();
    std::vector<double> mix(k);
    for (int i = 0; i < k; ++i) mix[i] = lambda * p[i] + (1 - lambda) * r[i];
    const Distribution lhs = *Induce(*Distribution::Create(mix), pi);
    const Distribution ip = *Induce(p, pi), ir = *Induce(r, pi);
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(lhs[j], lambda * ip[j] + (1 - lambda) * ir[j], 1e-14);
    }
  }
}

TEST(CompressSamplesTest, DirectLookup) {
  const Partition pi = *Partition::Create(2, {0, 0, 1, 1});
  const SampleSet s{.k = 4, .source = Group::kSecond, .values = {2, 0, 3, 1}};
  const SampleSet c = *CompressSamples(s, pi);
  EXPECT_EQ(c.values, (std::vector<int32_t>{1, 0, 1, 0}));
  EXPECT_EQ(c.k, 2);
  EXPECT_EQ(c.source, Group::kSecond);
  const SampleSet bad{.k = 4, .source = Group::kFirst, .values = {4}};
  EXPECT_TRUE(absl::IsOutOfRange(CompressSamples(bad, pi).status()));
}

TEST(CompressSamplesTest, IdentityRelabelsBijectively) {
  const Partition pi = *Partition::Create(4, {2, 0, 3, 1});
  const SampleSet s{.k = 4, .source = Group::kFirst, .values = {0, 1, 2, 3, 0}};
  EXPECT_EQ(CompressSamples(s, pi)->values,
            (std::vector<int32_t>{2, 0, 3, 1, 2}));
}

TEST(CompressSamplesTest, EmpiricalMatchesInduced) {
  Rng rng(12, 0);
  const Distribution p = RandomPmf(12, rng);
  const Partition pi = *RandomPartition(12, 3, rng);
  const int n = 100000;
  const SampleSet c = *CompressSamples(Sample(p, n, rng), pi);
  const Histogram h = Histogram::FromSamples(c.values, 3);
  const Distribution induced = *Induce(p, pi);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(h[j] / double(n), induced[j], 0.01);
}

TEST(CompressionTest, DistanceShrinkageHoldsOften) {
  const int k = 16;
  const auto pair = *MakeFamily(FamilyKind::kPaninskiFar, k, 0.5);
  Rng rng(14, 0);
  for (int parts : {2, 4, 8}) {
    const int trials = 1000;
    int kept = 0;
    for (int t = 0; t < trials; ++t) {
      const Partition pi = *RandomPartition(k, parts, rng);
      const double tv =
          *TvDistance(*Induce(pair.first, pi), *Induce(pair.second, pi));
      kept += tv >= 0.05 * std::sqrt(double(parts) / k) * 0.5;
    }
    EXPECT_GE(kept / double(trials), 0.1) << parts;
  }
}

TEST(CompressionTest, EstimatedConstantsAreConsistent) {
  const int k = 16;
  const auto pair = *MakeFamily(FamilyKind::kPaninskiFar, k, 0.5);
  Rng rng(15, 0);
  const CompressionConstants c =
      *EstimateCompressionConstants(pair.first, pair.second, 2, 0.75, 1000, rng);
  EXPECT_GT(c.c1, 0);
  EXPECT_EQ(c.c2, 0.75);
  // Re-check the defining property on fresh partitions.
  Rng fresh(16, 0);
  int kept = 0;
  for (int t = 0; t < 2000; ++t) {
    const Partition pi = *RandomPartition(k, 2, fresh);
    const double tv =
        *TvDistance(*Induce(pair.first, pi), *Induce(pair.second, pi));
    kept += tv >= c.c1 * std::sqrt(2.0 / k) * 0.5 - 1e-12;
  }
  EXPECT_GE(kept / 2000.0, 0.75 - 0.03);
  EXPECT_FALSE(EstimateCompressionConstants(pair.first, pair.first, 2, 0.75,
                                            100, rng)
                   .ok());
}

}  // namespace
}  // namespace hetclose
