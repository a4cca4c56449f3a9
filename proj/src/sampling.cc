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

#include "hetclose/sampling.h"

#include <cmath>

namespace hetclose {
namespace {

constexpr double kInversionCutoff = 10.0;

int64_t PoissonInversion(double mean, Rng& rng) {
  const double start = std::exp(-mean);
  while (true) {
    const double u = rng.Uniform01();
    int64_t x = 0;
    double p = start;
    double cdf = p;
    // The cap only triggers when rounding keeps the cdf below u; redraw.
    while (u > cdf && x < 1000) {
      ++x;
      p *= mean / static_cast<double>(x);
      cdf += p;
    }
    if (u <= cdf) return x;
  }
}

// W. Hormann, "The transformed rejection method for generating Poisson random
// variables", Insurance: Mathematics and Economics 12 (1993).
int64_t PoissonPtrs(double mean, Rng& rng) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2);
  while (true) {
    const double u = rng.Uniform01() - 0.5;
    const double v = rng.Uniform01();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<int64_t>(k);
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1)) {
      return static_cast<int64_t>(k);
    }
  }
}

}  // namespace

AliasSampler::AliasSampler(const Distribution& dist)
    : threshold_(dist.k()), alias_(dist.k()) {
  const int k = dist.k();
  std::vector<double> scaled(k);
  std::vector<int32_t> small;
  std::vector<int32_t> large;
  for (int i = 0; i < k; ++i) {
    scaled[i] = dist[i] * k;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const int32_t s = small.back();
    small.pop_back();
    const int32_t l = large.back();
    threshold_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (int32_t i : large) {
    threshold_[i] = 1.0;
    alias_[i] = i;
  }
  for (int32_t i : small) {
    threshold_[i] = 1.0;
    alias_[i] = i;
  }
}

int32_t AliasSampler::Draw(Rng& rng) const {
  const auto column = static_cast<int32_t>(rng.UniformInt(threshold_.size()));
  return rng.Uniform01() < threshold_[column] ? column : alias_[column];
}

SampleSet Sample(const Distribution& dist, int64_t n, Rng& rng, Group source) {
  SampleSet out{.k = dist.k(), .source = source, .values = {}};
  if (n <= 0) return out;
  const AliasSampler sampler(dist);
  out.values.resize(static_cast<size_t>(n));
  for (auto& v : out.values) v = sampler.Draw(rng);
  return out;
}

int64_t SamplePoisson(double mean, Rng& rng) {
  if (mean <= 0) return 0;
  return mean < kInversionCutoff ? PoissonInversion(mean, rng)
                                 : PoissonPtrs(mean, rng);
}

}  // namespace hetclose
