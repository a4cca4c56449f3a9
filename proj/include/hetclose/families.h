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

#ifndef HETCLOSE_FAMILIES_H_
#define HETCLOSE_FAMILIES_H_

#include <string_view>
#include <utility>

#include "absl/status/statusor.h"
#include "hetclose/distribution.h"

namespace hetclose {

// Test instances for the closeness promise problem. Each family returns a
// pair (p, q); for every kind except kUniform, TV(p, q) == alpha exactly.
//
//   kUniform      (U_k, U_k).
//   kPaninskiFar  p = U_k, q_i = (1 + 2 alpha)/k on even i and (1 - 2 alpha)/k
//                 on odd i. Needs k even and alpha <= 1/2.
//   kZipf         p_i proportional to 1/(i+1); q moves alpha of mass onto the
//                 last symbol: q = (1-t) p + t e_{k-1}, t = alpha/(1-p_{k-1}).
//   kTwoSpike     p = (1-alpha) U_k + alpha e_0, q = (1-alpha) U_k + alpha e_1.
enum class FamilyKind { kUniform, kPaninskiFar, kZipf, kTwoSpike };

std::string_view FamilyName(FamilyKind kind);
absl::StatusOr<FamilyKind> ParseFamily(std::string_view name);

absl::StatusOr<std::pair<Distribution, Distribution>> MakeFamily(
    FamilyKind kind, int k, double alpha);

}  // namespace hetclose

#endif  // HETCLOSE_FAMILIES_H_
