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

#include "hetclose/majority.h"

#include "absl/strings/str_format.h"
#include "hetclose/status_macros.h"

namespace hetclose {

absl::StatusOr<TestVerdict> MajorityRepeat(const TestProcedure& test,
                                           int repetitions, const Rng& rng) {
  if (repetitions < 1 || repetitions % 2 == 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "repetitions must be a positive odd number, got %d", repetitions));
  }
  int accepts = 0;
  for (int i = 0; i < repetitions; ++i) {
    Rng run = rng.Fork(static_cast<uint64_t>(i));
    ASSIGN_OR_RETURN(TestVerdict verdict, test(run));
    if (verdict == TestVerdict::kAccept) ++accepts;
  }
  return 2 * accepts > repetitions ? TestVerdict::kAccept
                                   : TestVerdict::kReject;
}

}  // namespace hetclose
