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

#include "hetclose/families.h"

#include <string>
#include <vector>

#include "absl/strings/str_format.h"
#include "hetclose/status_macros.h"

namespace hetclose {

std::string_view FamilyName(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kUniform:
      return "uniform";
    case FamilyKind::kPaninskiFar:
      return "paninski-far";
    case FamilyKind::kZipf:
      return "zipf";
    case FamilyKind::kTwoSpike:
      return "two-spike";
  }
  return "unknown";
}

absl::StatusOr<FamilyKind> ParseFamily(std::string_view name) {
  for (FamilyKind kind : {FamilyKind::kUniform, FamilyKind::kPaninskiFar,
                          FamilyKind::kZipf, FamilyKind::kTwoSpike}) {
    if (FamilyName(kind) == name) return kind;
  }
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown distribution family '%s'", std::string(name)));
}

absl::StatusOr<std::pair<Distribution, Distribution>> MakeFamily(
    FamilyKind kind, int k, double alpha) {
  if (k < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("k must be at least 2, got %d", k));
  }
  if (!(alpha > 0 && alpha <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must lie in (0, 1], got %g", alpha));
  }
  const Distribution uniform = Distribution::Uniform(k);
  switch (kind) {
    case FamilyKind::kUniform:
      return std::make_pair(uniform, uniform);

    case FamilyKind::kPaninskiFar: {
      if (k % 2 != 0 || alpha > 0.5) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "paninski-far needs even k and alpha <= 1/2 (k=%d, alpha=%g)", k,
            alpha));
      }
      std::vector<double> q(k);
      for (int i = 0; i < k; ++i) {
        q[i] = (i % 2 == 0 ? 1 + 2 * alpha : 1 - 2 * alpha) / k;
      }
      ASSIGN_OR_RETURN(Distribution far, Distribution::Create(std::move(q)));
      return std::make_pair(uniform, std::move(far));
    }

    case FamilyKind::kZipf: {
      std::vector<double> p(k);
      double norm = 0;
      for (int i = 0; i < k; ++i) norm += 1.0 / (i + 1);
      for (int i = 0; i < k; ++i) p[i] = 1.0 / ((i + 1) * norm);
      const double room = 1.0 - p[k - 1];
      if (alpha > room) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "zipf over %d symbols cannot be moved by alpha=%g (max %g)", k,
            alpha, room));
      }
      const double t = alpha / room;
      std::vector<double> q(k);
      for (int i = 0; i < k; ++i) q[i] = (1 - t) * p[i];
      q[k - 1] += t;
      ASSIGN_OR_RETURN(Distribution base, Distribution::Create(std::move(p)));
      ASSIGN_OR_RETURN(Distribution far, Distribution::Create(std::move(q)));
      return std::make_pair(std::move(base), std::move(far));
    }

    case FamilyKind::kTwoSpike: {
      std::vector<double> p(k, (1 - alpha) / k);
      std::vector<double> q = p;
      p[0] += alpha;
      q[1] += alpha;
      ASSIGN_OR_RETURN(Distribution base, Distribution::Create(std::move(p)));
      ASSIGN_OR_RETURN(Distribution far, Distribution::Create(std::move(q)));
      return std::make_pair(std::move(base), std::move(far));
    }
  }
  return absl::InvalidArgumentError("unknown family");
}

}  // namespace hetclose
