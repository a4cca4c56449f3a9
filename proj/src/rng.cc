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

#include "hetclose/rng.h"

#include <limits>
#include <utility>

namespace hetclose {
namespace {

void AppendWord(std::vector<uint32_t>& path, uint64_t word) {
  path.push_back(static_cast<uint32_t>(word & 0xffffffffu));
  path.push_back(static_cast<uint32_t>(word >> 32));
}

std::mt19937_64 SeedEngine(const std::vector<uint32_t>& path) {
  std::seed_seq seq(path.begin(), path.end());
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(uint64_t seed, uint64_t stream) {
  AppendWord(path_, seed);
  AppendWord(path_, stream);
  engine_ = SeedEngine(path_);
}

Rng::Rng(std::vector<uint32_t> path)
    : path_(std::move(path)), engine_(SeedEngine(path_)) {}

Rng Rng::Fork(uint64_t substream) const {
  std::vector<uint32_t> child = path_;
  AppendWord(child, substream);
  return Rng(std::move(child));
}

uint64_t Rng::UniformInt(uint64_t bound) {
  // Rejection on the largest multiple of `bound` keeps the draw exactly
  // uniform.
  const uint64_t limit =
      std::numeric_limits<uint64_t>::max() -
      std::numeric_limits<uint64_t>::max() % bound;
  uint64_t x = NextU64();
  while (x >= limit) x = NextU64();
  return x % bound;
}

}  // namespace hetclose
