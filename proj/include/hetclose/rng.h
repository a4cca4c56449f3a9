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

#ifndef HETCLOSE_RNG_H_
#define HETCLOSE_RNG_H_

#include <cstdint>
#include <random>
#include <vector>

namespace hetclose {

// Seeded random source addressed by a (seed, stream path). Two generators
// built from the same path produce identical draws on every platform: the
// engine (mt19937_64) and std::seed_seq are both fully specified, and every
// derived variate below is computed by hand rather than through the
// implementation-defined <random> distributions.
//
// Substreams: Fork(i) returns an independent generator keyed by the parent
// path plus `i`. The harness gives each Monte Carlo trial its own fork, so
// results never depend on how trials are scheduled across threads.
class Rng {
 public:
  Rng(uint64_t seed, uint64_t stream);

  Rng Fork(uint64_t substream) const;

  uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform01() {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound). Requires bound > 0.
  uint64_t UniformInt(uint64_t bound);

  bool Bernoulli(double p) { return Uniform01() < p; }

  const std::vector<uint32_t>& path() const { return path_; }

 private:
  explicit Rng(std::vector<uint32_t> path);

  std::vector<uint32_t> path_;
  std::mt19937_64 engine_;
};

}  // namespace hetclose

#endif  // HETCLOSE_RNG_H_
