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

#ifndef HETCLOSE_RANDOMIZED_RESPONSE_H_
#define HETCLOSE_RANDOMIZED_RESPONSE_H_

#include <cmath>
#include <cstdint>

#include "hetclose/rng.h"

namespace hetclose {

// Binary randomized response: keep the bit with probability e^eps/(e^eps+1),
// flip it with probability 1/(e^eps+1).
//
// The channel is held as unnormalized weights (e^eps for "same bit", 1 for
// "flipped"); both columns of the 2x2 matrix share the normalizer, so the
// likelihood ratio between any two inputs is a ratio of these weights.
class RrChannel {
 public:
  explicit RrChannel(double epsilon)
      : epsilon_(epsilon), keep_weight_(std::exp(epsilon)) {}

  double epsilon() const { return epsilon_; }
  double FlipProbability() const { return 1.0 / (keep_weight_ + 1.0); }
  double KeepProbability() const {
    return std::isinf(keep_weight_) ? 1.0 : keep_weight_ / (keep_weight_ + 1.0);
  }

  // Pr[output | input] for bits in {0, 1}.
  double Probability(int output, int input) const {
    return output == input ? KeepProbability() : FlipProbability();
  }

  // max over outputs o and inputs b, b' of Pr[o | b] / Pr[o | b'], taken on
  // the unnormalized weights. Equals e^eps.
  double MaxLikelihoodRatio() const {
    constexpr double kFlipWeight = 1.0;
    return keep_weight_ >= kFlipWeight ? keep_weight_ / kFlipWeight
                                       : kFlipWeight / keep_weight_;
  }

  int Apply(int bit, Rng& rng) const {
    return rng.Uniform01() < FlipProbability() ? 1 - bit : bit;
  }

 private:
  double epsilon_;
  double keep_weight_;
};

inline double FlipProbability(double epsilon) {
  return RrChannel(epsilon).FlipProbability();
}

inline int RrFlip(int bit, double epsilon, Rng& rng) {
  return RrChannel(epsilon).Apply(bit, rng);
}

// gamma = (e^eps + 1)/(e^eps - 1), the debiasing scale of one RR bit.
inline double DebiasScale(double epsilon) {
  const double e = std::exp(epsilon);
  return (e + 1.0) / (e - 1.0);
}

}  // namespace hetclose

#endif  // HETCLOSE_RANDOMIZED_RESPONSE_H_
