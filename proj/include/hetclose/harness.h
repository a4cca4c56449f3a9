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

// Monte Carlo harness: sample-size formulas, calibration of unstated
// constants, experiment runs, and privacy bookkeeping for all five models.

#ifndef HETCLOSE_HARNESS_H_
#define HETCLOSE_HARNESS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "hetclose/distribution.h"
#include "hetclose/families.h"
#include "hetclose/rng.h"
#include "hetclose/shuffle_protocol.h"
#include "json.hpp"

namespace hetclose {

enum class Model {
  kLocalPrivate,
  kLocalPublic,
  kShufflePrivate,
  kShufflePublic,
  kCentral,
};

std::string_view ModelName(Model model);
absl::StatusOr<Model> ParseModel(std::string_view name);
bool IsPublicCoin(Model model);
std::string_view ShufflerModeName(ShufflerMode mode);
absl::StatusOr<ShufflerMode> ParseShufflerMode(std::string_view name);

// Everything that determines the protocol instance apart from the sample-size
// multiplier and calibrated constants.
struct GridPoint {
  Model model = Model::kLocalPrivate;
  // Far pair; the null pair is (p, p) with p its first member.
  FamilyKind family = FamilyKind::kTwoSpike;
  int k = 0;
  double alpha = 0;
  double eps1 = 1;
  double eps2 = 1;
  // Shuffle models only.
  double delta = 1e-6;
  // Public-coin models only: odd repetition count and number of parts
  // (0 picks the model default: 2 for local, the closed form for shuffle).
  int repetitions = 3;
  int compressed_size = 0;
  ShufflerMode shuffler_mode = ShufflerMode::kPoissonized;

  absl::Status Validate() const;
  nlohmann::json ToJson() const;
  static absl::StatusOr<GridPoint> FromJson(const nlohmann::json& json);

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

// The default far family: two-spike for private-coin models, paninski-far for
// public-coin models.
FamilyKind DefaultFamily(Model model);

struct SampleRequirement {
  // Closed-form values before the multiplier and rounding.
  double n1_formula = 0;
  double n2_formula = 0;
  int64_t n1 = 0;
  int64_t n2 = 0;
  // Central only: the looser (eps1/eps2) n1.
  int64_t n2_loose = 0;
  // Shuffle only.
  int64_t mu1 = 0;
  int64_t mu2 = 0;
  // Public-coin only: the number of parts actually used.
  int compressed_size = 0;
};

// Closed-form sample sizes times `multiplier`:
//   local-private  n_i = k^{3/2} / (alpha^2 eps_i^2)
//   local-public   n_i = k / (alpha^2 eps_i^2)
//   shuffle-private n1 = sqrt(k)/alpha^2 + k^{3/4} sqrt(ln(1/delta))/(alpha eps1)
//                   + min(eps1^2 eps2^2 / (alpha^4 ln^2(1/delta)),
//                         k^{2/3}/alpha^{4/3} (eps2/eps1)^{2/3})
//   shuffle-public n1 = sqrt(k)/alpha^2 + k^{2/3} ln^{1/3}(1/delta)/
//                   (alpha^{4/3} eps1^{2/3}) + sqrt(k) sqrt(ln(1/delta))/(alpha eps1)
//   central        n1 = max(sqrt(k)/alpha^2, sqrt(k)/(sqrt(eps1) alpha),
//                   k^{2/3}/alpha^{4/3}, k^{1/3}/(eps1^{2/3} alpha^{4/3}),
//                   1/(eps1 alpha))
// Shuffle n2 follows the exact coupling n1 mu2 = n2 mu1 (n1 rounded up to
// the coupling step); central n2 is the smallest count whose subsampling
// amplification reaches eps2.
absl::StatusOr<SampleRequirement> RequiredSamples(const GridPoint& point,
                                                  double multiplier);

using Constants = std::map<std::string, double>;

struct RateEstimate {
  int trials = 0;
  int hits = 0;

  double rate() const { return trials == 0 ? 0 : double(hits) / trials; }
  // Binomial standard error sqrt(r (1 - r) / trials).
  double se() const;
};

struct CalibrationRecord {
  GridPoint point;
  double multiplier = 1;
  Constants constants;
  // Evidence.
  int trials = 0;
  double quantile = 0;
  double target = 0;
  uint64_t seed = 0;
  RateEstimate null_accepts;
  RateEstimate far_rejects;
  std::vector<double> multipliers_tried;

  nlohmann::json ToJson() const;
  static absl::StatusOr<CalibrationRecord> FromJson(const nlohmann::json& json);
};

struct CalibrationOptions {
  int trials = 500;
  // Null acceptance level used for thresholds (shuffle: quantile of Z;
  // central: 1 - target reject probability).
  double quantile = 0.8;
  // Minimum calibration-run rate required of both error types.
  double target = 2.0 / 3.0;
  uint64_t seed = 1;
  int jobs = 1;
  // Fixed multiplier: calibrate the constants only.
  std::optional<double> multiplier;
  double max_multiplier = 10000;
};

// Multipliers tried in increasing order: 1, 2, 3, 4, 5, 6, 8 then the
// 10, 12, 15, 20, 25, 30, 40, 50, 60, 80 pattern per decade.
std::vector<double> MultiplierGrid(double max_multiplier);

absl::StatusOr<CalibrationRecord> Calibrate(const GridPoint& point,
                                            const CalibrationOptions& options);

// Model constants at a fixed multiplier, from null-only (and, for the
// compression constant, pair-only) Monte Carlo on `rng`.
absl::StatusOr<Constants> CalibrateConstants(const GridPoint& point,
                                             const SampleRequirement& samples,
                                             int trials, double quantile,
                                             const Rng& rng);

struct GroupAudit {
  int group = 1;
  double epsilon_target = 0;
  double delta_target = 0;
  double epsilon_certified = 0;
  double delta_certified = 0;
  bool pass = false;
  std::string detail;
};

struct PrivacyAuditReport {
  Model model = Model::kLocalPrivate;
  std::vector<GroupAudit> groups;

  bool pass() const;
  nlohmann::json ToJson() const;
};

struct AuditInputs {
  Model model = Model::kLocalPrivate;
  double eps1 = 1;
  double eps2 = 1;
  double delta = 1e-6;
  int64_t n1 = 0;
  int64_t n2 = 0;
  // Shuffle: noise means in use (unset: the minimal admissible values).
  std::optional<int64_t> mu1;
  std::optional<int64_t> mu2;
  // Central: divisor used by the release.
  double central_sensitivity = 4.0;
};

// Local: the randomized-response likelihood ratio equals e^eps exactly.
// Shuffle: each mu meets the Poisson-mechanism bound at (eps_i, delta).
// Central: group 1 certified eps1 * (4 / divisor) since one replaced sample
// moves the statistic by at most 4; group 2 is the subsampling amplification
// of that value.
absl::StatusOr<PrivacyAuditReport> PrivacyAudit(const AuditInputs& inputs);

struct ExperimentSpec {
  GridPoint point;
  int trials = 500;
  uint64_t seed = 1;
  int jobs = 1;
  bool keep_verdicts = false;
};

struct TrialReport {
  ExperimentSpec spec;
  CalibrationRecord calibration;
  SampleRequirement samples;
  RateEstimate null_accepts;
  RateEstimate far_rejects;
  PrivacyAuditReport audit;
  double wall_time_seconds = 0;
  std::vector<TestVerdict> null_verdicts;
  std::vector<TestVerdict> far_verdicts;

  // Both rates at least 2/3 - 2 SE and the audit passes.
  bool Meets(double level = 2.0 / 3.0) const;
  nlohmann::json ToJson() const;
  // model,k,alpha,eps1,eps2,delta,n1,n2,accept_rate_null,reject_rate_far,
  // se_null,se_far,seed
  std::string CsvRow() const;
  static std::string CsvHeader();
};

// Checks that `calibration` was produced for spec.point; runs the null and
// far trials with per-trial substreams of spec.seed.
absl::StatusOr<TrialReport> RunExperiment(const ExperimentSpec& spec,
                                          const CalibrationRecord& calibration);

// Calls fn(i) for i in [0, n) on up to `jobs` threads.
void ParallelFor(int n, int jobs, const std::function<void(int)>& fn);

}  // namespace hetclose

#endif  // HETCLOSE_HARNESS_H_
