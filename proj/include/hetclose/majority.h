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

#ifndef HETCLOSE_MAJORITY_H_
#define HETCLOSE_MAJORITY_H_

#include <functional>

#include "absl/status/statusor.h"
#include "hetclose/distribution.h"
#include "hetclose/rng.h"

namespace hetclose {

// One independent run of a tester on fresh samples drawn from `rng`.
using TestProcedure = std::function<absl::StatusOr<TestVerdict>(Rng&)>;

// Runs `test` `repetitions` times, run i on substream i of `rng`, and returns
// the majority verdict. `repetitions` must be odd.
absl::StatusOr<TestVerdict> MajorityRepeat(const TestProcedure& test,
                                           int repetitions, const Rng& rng);

}  // namespace hetclose

#endif  // HETCLOSE_MAJORITY_H_
