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

#include "hetclose/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "absl/strings/str_format.h"
#include "hetclose/central_dp.h"
#include "hetclose/domain_compression.h"
#include "hetclose/local_protocol.h"
#include "hetclose/poisson_mechanism.h"
#include "hetclose/randomized_response.h"
#include "hetclose/status_macros.h"

namespace hetclose {
namespace {

using nlohmann::json;

// Stream ids of the top-level generators.
constexpr uint64_t kNullStream = 1;
constexpr uint64_t kFarStream = 2;
constexpr uint64_t kConstantsStream = 11;
constexpr uint64_t kCalibrationNullStream = 12;
constexpr uint64_t kCalibrationFarStream = 13;

// Fraction of random partitions required to keep the compressed distance.
constexpr double kCompressionKeepFraction = 0.75;
constexpr int kCompressionTrials = 1000;
// Level of the null quantile of Z / sqrt(n) used as the central shift.
constexpr double kCentralShiftQuantile = 0.9;
// One replaced sample moves a unit between two bins of one half-sample
// histogram; each of the two affected bins changes its term by at most 2.
constexpr double kCentralMoveSensitivity = 4.0;

constexpr Model kAllModels[] = {Model::kLocalPrivate, Model::kLocalPublic,
                                Model::kShufflePrivate, Model::kShufflePublic,
                                Model::kCentral};

bool IsLocal(Model m) {
  return m == Model::kLocalPrivate || m == Model::kLocalPublic;
}
bool IsShuffle(Model m) {
  return m == Model::kShufflePrivate || m == Model::kShufflePublic;
}

// A fully specified protocol instance.
struct Instance {
  Model model;
  LocalConfig local;
  ShuffleConfig shuffle;
  CentralConfig central;

  absl::StatusOr<TestVerdict> Run(const Distribution& p, const Distribution& q,
                                  Rng& rng) const {
    switch (model) {
      case Model::kLocalPrivate:
        return RunLocalPrivateCoin(local, p, q, rng);
      case Model::kLocalPublic:
        return RunLocalPublicCoin(local, p, q, rng);
      case Model::kShufflePrivate:
        return RunShufflePrivateCoin(shuffle, p, q, rng);
      case Model::kShufflePublic:
        return RunShufflePublicCoin(shuffle, p, q, rng);
      case Model::kCentral:
        return RunCentral(central, p, q, rng);
    }
    return absl::InternalError("unknown model");
  }
};

double ConstantOr(const Constants& constants, const std::string& name,
                  double fallback) {
  const auto it = constants.find(name);
  return it == constants.end() ? fallback : it->second;
}

Instance MakeInstance(const GridPoint& point, const SampleRequirement& samples,
                      const Constants& constants) {
  Instance instance{.model = point.model, .local = {}, .shuffle = {},
                    .central = {}};
  if (IsLocal(point.model)) {
    instance.local = LocalConfig{
        .k = point.k,
        .alpha = point.alpha,
        .eps1 = point.eps1,
        .eps2 = point.eps2,
        .n1 = samples.n1,
        .n2 = samples.n2,
        .threshold = std::nullopt,
        .public_coin = point.model == Model::kLocalPublic,
        .compressed_size = std::max(2, samples.compressed_size),
        .compression_c1 = ConstantOr(constants, "compression_c1", 1.0),
        .repetitions = point.repetitions};
  } else if (IsShuffle(point.model)) {
    instance.shuffle = ShuffleConfig{
        .k = point.k,
        .alpha = point.alpha,
        .eps1 = point.eps1,
        .eps2 = point.eps2,
        .delta = point.delta,
        .delta1 = std::nullopt,
        .delta2 = std::nullopt,
        .n1 = samples.n1,
        .n2 = samples.n2,
        .public_coin = point.model == Model::kShufflePublic,
        .compressed_size = std::max(2, samples.compressed_size),
        .compression_c1 = 1.0,
        .repetitions = point.repetitions,
        .threshold = std::nullopt,
        .mode = point.shuffler_mode};
    if (constants.count("threshold")) {
      instance.shuffle.threshold = constants.at("threshold");
    }
  } else {
    instance.central = CentralConfig{
        .k = point.k,
        .alpha = point.alpha,
        .eps1 = point.eps1,
        .eps2 = point.eps2,
        .n1 = samples.n1,
        .n2 = samples.n2,
        .c1 = ConstantOr(constants, "c1", 0.0),
        .c2 = ConstantOr(constants, "c2", 0.0),
        .sensitivity = kCentralMoveSensitivity};
  }
  return instance;
}

absl::Status ValidateInstance(const Instance& instance) {
  if (IsLocal(instance.model)) return instance.local.Validate();
  if (IsShuffle(instance.model)) return instance.shuffle.Validate();
  return instance.central.Validate();
}

struct Pairs {
  Distribution null;
  Distribution p;
  Distribution q;
};

absl::StatusOr<Pairs> MakePairs(const GridPoint& point) {
  ASSIGN_OR_RETURN(auto pair, MakeFamily(point.family, point.k, point.alpha));
  return Pairs{.null = pair.first, .p = pair.first, .q = pair.second};
}

// Runs `trials` verdicts of `instance` on (p, q), trial t on base.Fork(t).
absl::StatusOr<std::vector<TestVerdict>> RunTrials(const Instance& instance,
                                                   const Distribution& p,
                                                   const Distribution& q,
                                                   int trials, const Rng& base,
                                                   int jobs) {
  std::vector<TestVerdict> verdicts(trials, TestVerdict::kAccept);
  std::vector<absl::Status> errors(trials);
  ParallelFor(trials, jobs, [&](int t) {
    Rng rng = base.Fork(static_cast<uint64_t>(t));
    absl::StatusOr<TestVerdict> verdict = instance.Run(p, q, rng);
    if (verdict.ok()) {
      verdicts[t] = *verdict;
    } else {
      errors[t] = verdict.status();
    }
  });
  for (const absl::Status& status : errors) RETURN_IF_ERROR(status);
  return verdicts;
}

RateEstimate Count(const std::vector<TestVerdict>& verdicts,
                   TestVerdict target) {
  RateEstimate rate{.trials = static_cast<int>(verdicts.size()), .hits = 0};
  for (TestVerdict v : verdicts) rate.hits += v == target ? 1 : 0;
  return rate;
}

json RateJson(const RateEstimate& rate) {
  return json{{"trials", rate.trials},
              {"hits", rate.hits},
              {"rate", rate.rate()},
              {"se", rate.se()}};
}

absl::StatusOr<RateEstimate> RateFromJson(const json& j) {
  if (!j.is_object() || !j.contains("trials") || !j.contains("hits")) {
    return absl::InvalidArgumentError("rate entry needs trials and hits");
  }
  return RateEstimate{.trials = j.at("trials").get<int>(),
                      .hits = j.at("hits").get<int>()};
}

json SamplesJson(const SampleRequirement& s) {
  return json{{"n1_formula", s.n1_formula}, {"n2_formula", s.n2_formula},
              {"n1", s.n1},                 {"n2", s.n2},
              {"n2_loose", s.n2_loose},     {"mu1", s.mu1},
              {"mu2", s.mu2},               {"compressed_size", s.compressed_size}};
}

// Outcome of one multiplier during the search.
struct Evaluation {
  double multiplier = 0;
  bool feasible = false;
  Constants constants;
  RateEstimate null_accepts;
  RateEstimate far_rejects;
};

absl::StatusOr<Evaluation> Evaluate(const GridPoint& point, const Pairs& pairs,
                                    double multiplier,
                                    const CalibrationOptions& options) {
  Evaluation eval;
  eval.multiplier = multiplier;
  ASSIGN_OR_RETURN(SampleRequirement samples, RequiredSamples(point, multiplier));
  // Too few users for the protocol's structure counts as a failed point.
  const absl::Status structural =
      ValidateInstance(MakeInstance(point, samples, {}));
  if (absl::IsFailedPrecondition(structural)) return eval;
  RETURN_IF_ERROR(structural);
  eval.feasible = true;
  ASSIGN_OR_RETURN(eval.constants,
                   CalibrateConstants(point, samples, options.trials,
                                      options.quantile,
                                      Rng(options.seed, kConstantsStream)));
  const Instance instance = MakeInstance(point, samples, eval.constants);
  ASSIGN_OR_RETURN(
      auto null_verdicts,
      RunTrials(instance, pairs.null, pairs.null, options.trials,
                Rng(options.seed, kCalibrationNullStream), options.jobs));
  ASSIGN_OR_RETURN(
      auto far_verdicts,
      RunTrials(instance, pairs.p, pairs.q, options.trials,
                Rng(options.seed, kCalibrationFarStream), options.jobs));
  eval.null_accepts = Count(null_verdicts, TestVerdict::kAccept);
  eval.far_rejects = Count(far_verdicts, TestVerdict::kReject);
  return eval;
}

bool Succeeds(const Evaluation& eval, double target) {
  return eval.feasible && eval.null_accepts.rate() >= target &&
         eval.far_rejects.rate() >= target;
}

std::string FormatDouble(double v) { return absl::StrFormat("%.10g", v); }

}  // namespace

std::string_view ModelName(Model model) {
  switch (model) {
    case Model::kLocalPrivate:
      return "local-private";
    case Model::kLocalPublic:
      return "local-public";
    case Model::kShufflePrivate:
      return "shuffle-private";
    case Model::kShufflePublic:
      return "shuffle-public";
    case Model::kCentral:
      return "central";
  }
  return "unknown";
}

absl::StatusOr<Model> ParseModel(std::string_view name) {
  for (Model m : kAllModels) {
    if (ModelName(m) == name) return m;
  }
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown model '%s'", std::string(name)));
}

bool IsPublicCoin(Model model) {
  return model == Model::kLocalPublic || model == Model::kShufflePublic;
}

std::string_view ShufflerModeName(ShufflerMode mode) {
  switch (mode) {
    case ShufflerMode::kPoissonized:
      return "poissonized";
    case ShufflerMode::kPerUser:
      return "per-user";
    case ShufflerMode::kFixedN:
      return "fixed-n";
  }
  return "unknown";
}

absl::StatusOr<ShufflerMode> ParseShufflerMode(std::string_view name) {
  for (ShufflerMode m : {ShufflerMode::kPoissonized, ShufflerMode::kPerUser,
                         ShufflerMode::kFixedN}) {
    if (ShufflerModeName(m) == name) return m;
  }
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown shuffler mode '%s'", std::string(name)));
}

FamilyKind DefaultFamily(Model model) {
  return IsPublicCoin(model) ? FamilyKind::kPaninskiFar : FamilyKind::kTwoSpike;
}

absl::Status GridPoint::Validate() const {
  if (k < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("k must be at least 2, got %d", k));
  }
  if (!(alpha > 0 && alpha <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must lie in (0, 1], got %g", alpha));
  }
  if (!(eps1 > 0 && eps1 <= 1) || !(eps2 > 0 && eps2 <= 1)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "eps1, eps2 must lie in (0, 1], got %g, %g", eps1, eps2));
  }
  if (!IsLocal(model) && eps2 > eps1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%s needs eps2 <= eps1, got eps1=%g eps2=%g",
        std::string(ModelName(model)), eps1, eps2));
  }
  if (IsShuffle(model) && !(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  if (repetitions < 1 || repetitions % 2 == 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "repetitions must be a positive odd count, got %d", repetitions));
  }
  if (compressed_size != 0 && (compressed_size < 2 || compressed_size > k)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "compressed size must be 0 (auto) or lie in [2, %d], got %d", k,
        compressed_size));
  }
  return MakeFamily(family, k, alpha).status();
}

json GridPoint::ToJson() const {
  return json{{"model", std::string(ModelName(model))},
              {"family", std::string(FamilyName(family))},
              {"k", k},
              {"alpha", alpha},
              {"eps1", eps1},
              {"eps2", eps2},
              {"delta", delta},
              {"repetitions", repetitions},
              {"compressed_size", compressed_size},
              {"shuffler_mode", std::string(ShufflerModeName(shuffler_mode))}};
}

absl::StatusOr<GridPoint> GridPoint::FromJson(const json& j) {
  if (!j.is_object()) {
    return absl::InvalidArgumentError("grid point must be a JSON object");
  }
  GridPoint point;
  try {
    ASSIGN_OR_RETURN(point.model, ParseModel(j.at("model").get<std::string>()));
    point.family = DefaultFamily(point.model);
    if (j.contains("family")) {
      ASSIGN_OR_RETURN(point.family,
                       ParseFamily(j.at("family").get<std::string>()));
    }
    point.k = j.at("k").get<int>();
    point.alpha = j.at("alpha").get<double>();
    point.eps1 = j.at("eps1").get<double>();
    point.eps2 = j.at("eps2").get<double>();
    point.delta = j.value("delta", point.delta);
    point.repetitions = j.value("repetitions", point.repetitions);
    point.compressed_size = j.value("compressed_size", point.compressed_size);
    if (j.contains("shuffler_mode")) {
      ASSIGN_OR_RETURN(point.shuffler_mode,
                       ParseShufflerMode(j.at("shuffler_mode").get<std::string>()));
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrFormat("bad grid point: %s", e.what()));
  }
  return point;
}

absl::StatusOr<SampleRequirement> RequiredSamples(const GridPoint& point,
                                                  double multiplier) {
  RETURN_IF_ERROR(point.Validate());
  if (!(multiplier > 0) || std::isinf(multiplier)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("multiplier must be positive, got %g", multiplier));
  }
  const double k = point.k;
  const double a = point.alpha;
  const double e1 = point.eps1;
  const double e2 = point.eps2;
  const auto scaled = [&](double formula) {
    return static_cast<int64_t>(std::ceil(multiplier * formula));
  };
  SampleRequirement out;
  switch (point.model) {
    case Model::kLocalPrivate:
    case Model::kLocalPublic: {
      const double base = point.model == Model::kLocalPrivate
                              ? std::pow(k, 1.5) / (a * a)
                              : k / (a * a);
      out.n1_formula = base / (e1 * e1);
      out.n2_formula = base / (e2 * e2);
      out.n1 = scaled(out.n1_formula);
      out.n2 = scaled(out.n2_formula);
      if (point.model == Model::kLocalPublic) {
        out.compressed_size =
            point.compressed_size == 0 ? 2 : point.compressed_size;
      }
      return out;
    }
    case Model::kShufflePrivate:
    case Model::kShufflePublic: {
      const double log_term = std::log(1.0 / point.delta);
      ASSIGN_OR_RETURN(out.mu1, PoissonMu(e1, point.delta));
      ASSIGN_OR_RETURN(out.mu2, PoissonMu(e2, point.delta));
      if (point.model == Model::kShufflePrivate) {
        out.n1_formula =
            std::sqrt(k) / (a * a) +
            std::pow(k, 0.75) * std::sqrt(log_term) / (a * e1) +
            std::min(e1 * e1 * e2 * e2 / (std::pow(a, 4) * log_term * log_term),
                     std::pow(k, 2.0 / 3.0) / std::pow(a, 4.0 / 3.0) *
                         std::pow(e2 / e1, 2.0 / 3.0));
      } else {
        out.n1_formula = std::sqrt(k) / (a * a) +
                         std::pow(k, 2.0 / 3.0) * std::cbrt(log_term) /
                             (std::pow(a, 4.0 / 3.0) * std::pow(e1, 2.0 / 3.0)) +
                         std::sqrt(k) * std::sqrt(log_term) / (a * e1);
        out.compressed_size = point.compressed_size == 0
                                  ? CompressedDomainSize(point.k, a, out.mu1)
                                  : point.compressed_size;
      }
      out.n2_formula = out.n1_formula * static_cast<double>(out.mu2) /
                       static_cast<double>(out.mu1);
      // Round so that every repetition's share is exactly coupled.
      const int reps =
          point.model == Model::kShufflePublic ? point.repetitions : 1;
      const int64_t per_run = (scaled(out.n1_formula) + reps - 1) / reps;
      ASSIGN_OR_RETURN(MixtureParams mix,
                       MixtureParamsFromMu(point.k, per_run, out.mu1, out.mu2));
      out.n1 = mix.n1 * reps;
      out.n2 = mix.n2 * reps;
      return out;
    }
    case Model::kCentral: {
      out.n1_formula = std::max(
          {std::sqrt(k) / (a * a), std::sqrt(k) / (std::sqrt(e1) * a),
           std::pow(k, 2.0 / 3.0) / std::pow(a, 4.0 / 3.0),
           std::cbrt(k) / (std::pow(e1, 2.0 / 3.0) * std::pow(a, 4.0 / 3.0)),
           1.0 / (e1 * a)});
      out.n2_formula = out.n1_formula * std::expm1(e1) / std::expm1(e2);
      out.n1 = std::max<int64_t>(2, scaled(out.n1_formula));
      ASSIGN_OR_RETURN(out.n2, MinimalGroupTwoCount(e1, e2, out.n1));
      out.n2_loose = static_cast<int64_t>(
          std::ceil(e1 / e2 * static_cast<double>(out.n1)));
      return out;
    }
  }
  return absl::InternalError("unknown model");
}

double RateEstimate::se() const {
  if (trials == 0) return 0;
  const double r = rate();
  return std::sqrt(r * (1 - r) / trials);
}

json CalibrationRecord::ToJson() const {
  return json{{"point", point.ToJson()},
              {"multiplier", multiplier},
              {"constants", constants},
              {"trials", trials},
              {"quantile", quantile},
              {"target", target},
              {"seed", seed},
              {"null_accepts", RateJson(null_accepts)},
              {"far_rejects", RateJson(far_rejects)},
              {"multipliers_tried", multipliers_tried}};
}

absl::StatusOr<CalibrationRecord> CalibrationRecord::FromJson(const json& j) {
  if (!j.is_object() || !j.contains("point")) {
    return absl::InvalidArgumentError("calibration record needs a point");
  }
  CalibrationRecord record;
  try {
    ASSIGN_OR_RETURN(record.point, GridPoint::FromJson(j.at("point")));
    record.multiplier = j.at("multiplier").get<double>();
    record.constants = j.at("constants").get<Constants>();
    record.trials = j.at("trials").get<int>();
    record.quantile = j.at("quantile").get<double>();
    record.target = j.at("target").get<double>();
    record.seed = j.at("seed").get<uint64_t>();
    ASSIGN_OR_RETURN(record.null_accepts, RateFromJson(j.at("null_accepts")));
    ASSIGN_OR_RETURN(record.far_rejects, RateFromJson(j.at("far_rejects")));
    record.multipliers_tried =
        j.value("multipliers_tried", std::vector<double>{});
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrFormat("bad calibration record: %s", e.what()));
  }
  return record;
}

std::vector<double> MultiplierGrid(double max_multiplier) {
  std::vector<double> grid;
  for (double m : {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0}) {
    if (m <= max_multiplier) grid.push_back(m);
  }
  for (double decade = 1; decade * 10 <= max_multiplier; decade *= 10) {
    for (double m : {10.0, 12.0, 15.0, 20.0, 25.0, 30.0, 40.0, 50.0, 60.0,
                     80.0}) {
      if (m * decade <= max_multiplier) grid.push_back(m * decade);
    }
  }
  if (grid.empty() || grid.back() < max_multiplier) {
    grid.push_back(max_multiplier);
  }
  return grid;
}

absl::StatusOr<Constants> CalibrateConstants(const GridPoint& point,
                                             const SampleRequirement& samples,
                                             int trials, double quantile,
                                             const Rng& rng) {
  ASSIGN_OR_RETURN(Pairs pairs, MakePairs(point));
  Instance instance = MakeInstance(point, samples, {});
  Constants constants;
  switch (point.model) {
    case Model::kLocalPrivate:
      return constants;
    case Model::kLocalPublic: {
      Rng compression_rng = rng.Fork(0);
      ASSIGN_OR_RETURN(
          CompressionConstants c,
          EstimateCompressionConstants(pairs.p, pairs.q,
                                       instance.local.compressed_size,
                                       kCompressionKeepFraction,
                                       kCompressionTrials, compression_rng));
      constants["compression_c1"] = c.c1;
      constants["compression_c2"] = c.c2;
      return constants;
    }
    case Model::kShufflePrivate:
    case Model::kShufflePublic: {
      ASSIGN_OR_RETURN(
          constants["threshold"],
          CalibrateShuffleThreshold(instance.shuffle, pairs.null, trials,
                                    quantile, rng.Fork(1)));
      return constants;
    }
    case Model::kCentral: {
      ASSIGN_OR_RETURN(
          CentralConstants c,
          CalibrateCentralConstants(instance.central, pairs.null, trials,
                                    kCentralShiftQuantile, 1 - quantile,
                                    rng.Fork(2)));
      constants["c1"] = c.c1;
      constants["c2"] = c.c2;
      constants["null_reject_prob"] = c.null_reject_prob;
      return constants;
    }
  }
  return absl::InternalError("unknown model");
}

absl::StatusOr<CalibrationRecord> Calibrate(const GridPoint& point,
                                            const CalibrationOptions& options) {
  RETURN_IF_ERROR(point.Validate());
  if (options.trials < 1 || !(options.quantile > 0 && options.quantile < 1) ||
      !(options.target > 0 && options.target < 1)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need trials >= 1, quantile and target in (0, 1); got %d, %g, %g",
        options.trials, options.quantile, options.target));
  }
  ASSIGN_OR_RETURN(Pairs pairs, MakePairs(point));
  CalibrationRecord record;
  record.point = point;
  record.trials = options.trials;
  record.quantile = options.quantile;
  record.target = options.target;
  record.seed = options.seed;
  const auto finish = [&](const Evaluation& eval) {
    record.multiplier = eval.multiplier;
    record.constants = eval.constants;
    record.null_accepts = eval.null_accepts;
    record.far_rejects = eval.far_rejects;
    return record;
  };

  if (options.multiplier.has_value()) {
    ASSIGN_OR_RETURN(Evaluation eval,
                     Evaluate(point, pairs, *options.multiplier, options));
    record.multipliers_tried.push_back(eval.multiplier);
    if (!eval.feasible) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "multiplier %g gives too few users for %s", *options.multiplier,
          std::string(ModelName(point.model))));
    }
    return finish(eval);
  }

  // Power grows with the multiplier: probe indices 0, 1, 3, 7, ... until a
  // success, then bisect between the last failure and that success.
  const std::vector<double> grid = MultiplierGrid(options.max_multiplier);
  std::map<int, Evaluation> seen;
  const auto evaluate = [&](int index) -> absl::StatusOr<bool> {
    if (!seen.count(index)) {
      ASSIGN_OR_RETURN(Evaluation eval,
                       Evaluate(point, pairs, grid[index], options));
      record.multipliers_tried.push_back(eval.multiplier);
      seen.emplace(index, std::move(eval));
    }
    return Succeeds(seen.at(index), options.target);
  };
  const int last = static_cast<int>(grid.size()) - 1;
  int fail = -1;
  int success = -1;
  for (int step = 1, index = 0;; step *= 2) {
    index = std::min(index, last);
    ASSIGN_OR_RETURN(const bool ok, evaluate(index));
    if (ok) {
      success = index;
      break;
    }
    fail = index;
    if (index == last) break;
    index += step;
  }
  if (success < 0) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "no multiplier up to %g reaches rate %.3f for %s", grid[last],
        options.target, std::string(ModelName(point.model))));
  }
  while (success - fail > 1) {
    const int mid = (fail + success) / 2;
    ASSIGN_OR_RETURN(const bool ok, evaluate(mid));
    (ok ? success : fail) = mid;
  }
  return finish(seen.at(success));
}

bool PrivacyAuditReport::pass() const {
  return !groups.empty() &&
         std::all_of(groups.begin(), groups.end(),
                     [](const GroupAudit& g) { return g.pass; });
}

json PrivacyAuditReport::ToJson() const {
  json out = json{{"model", std::string(ModelName(model))},
                  {"pass", pass()},
                  {"groups", json::array()}};
  for (const GroupAudit& g : groups) {
    out["groups"].push_back(json{{"group", g.group},
                                 {"epsilon_target", g.epsilon_target},
                                 {"delta_target", g.delta_target},
                                 {"epsilon_certified", g.epsilon_certified},
                                 {"delta_certified", g.delta_certified},
                                 {"pass", g.pass},
                                 {"detail", g.detail}});
  }
  return out;
}

absl::StatusOr<PrivacyAuditReport> PrivacyAudit(const AuditInputs& in) {
  if (!(in.eps1 > 0) || !(in.eps2 > 0)) {
    return absl::InvalidArgumentError("privacy parameters must be positive");
  }
  PrivacyAuditReport report{.model = in.model, .groups = {}};
  const double targets[2] = {in.eps1, in.eps2};
  if (IsLocal(in.model)) {
    for (int g = 0; g < 2; ++g) {
      const RrChannel channel(targets[g]);
      const double ratio = channel.MaxLikelihoodRatio();
      const double expected = std::exp(targets[g]);
      report.groups.push_back(GroupAudit{
          .group = g + 1,
          .epsilon_target = targets[g],
          .delta_target = 0,
          .epsilon_certified = std::log(ratio),
          .delta_certified = 0,
          .pass = ratio == expected,
          .detail = absl::StrFormat(
              "randomized response likelihood ratio %.17g vs e^eps %.17g",
              ratio, expected)});
    }
    return report;
  }
  if (IsShuffle(in.model)) {
    const std::optional<int64_t> overrides[2] = {in.mu1, in.mu2};
    for (int g = 0; g < 2; ++g) {
      ASSIGN_OR_RETURN(const double bound,
                       PoissonNoiseBound(targets[g], in.delta, 1));
      int64_t mu = 0;
      if (overrides[g].has_value()) {
        mu = *overrides[g];
      } else {
        ASSIGN_OR_RETURN(mu, PoissonMu(targets[g], in.delta, 1));
      }
      const PoissonMechanismParams params{.epsilon = targets[g],
                                          .delta = in.delta,
                                          .sensitivity = 1,
                                          .mu = mu};
      const bool ok = SatisfiesPoissonBound(params);
      report.groups.push_back(GroupAudit{
          .group = g + 1,
          .epsilon_target = targets[g],
          .delta_target = in.delta,
          .epsilon_certified =
              ok ? targets[g] : std::numeric_limits<double>::infinity(),
          .delta_certified = ok ? in.delta : 1.0,
          .pass = ok,
          .detail = absl::StrFormat("mu=%d, Poisson-mechanism bound %.6f", mu,
                                    bound)});
    }
    return report;
  }
  // Central.
  if (!(in.central_sensitivity > 0)) {
    return absl::InvalidArgumentError("central divisor must be positive");
  }
  const double certified1 =
      in.eps1 * kCentralMoveSensitivity / in.central_sensitivity;
  constexpr double kSlack = 1e-12;
  report.groups.push_back(GroupAudit{
      .group = 1,
      .epsilon_target = in.eps1,
      .delta_target = 0,
      .epsilon_certified = certified1,
      .delta_certified = 0,
      .pass = certified1 <= in.eps1 * (1 + kSlack),
      .detail = absl::StrFormat(
          "statistic moves by at most %g per replaced sample; release divides "
          "by %g; logistic ratio bound gives eps %.6f",
          kCentralMoveSensitivity, in.central_sensitivity, certified1)});
  ASSIGN_OR_RETURN(const double certified2,
                   AmplifiedEpsilon(certified1, in.n1, in.n2));
  report.groups.push_back(GroupAudit{
      .group = 2,
      .epsilon_target = in.eps2,
      .delta_target = 0,
      .epsilon_certified = certified2,
      .delta_certified = 0,
      .pass = certified2 <= in.eps2 * (1 + kSlack),
      .detail = absl::StrFormat(
          "subsampling %d of %d records: ln(1 + (n1/n2)(e^%.6f - 1)) = %.6f",
          in.n1, in.n2, certified1, certified2)});
  return report;
}

bool TrialReport::Meets(double level) const {
  return null_accepts.rate() >= level - 2 * null_accepts.se() &&
         far_rejects.rate() >= level - 2 * far_rejects.se() && audit.pass();
}

json TrialReport::ToJson() const {
  json out{{"spec",
            {{"point", spec.point.ToJson()},
             {"trials", spec.trials},
             {"seed", spec.seed}}},
           {"multiplier", calibration.multiplier},
           {"calibrated_constants", calibration.constants},
           {"calibration", calibration.ToJson()},
           {"samples", SamplesJson(samples)},
           {"accept_rate_null", null_accepts.rate()},
           {"reject_rate_far", far_rejects.rate()},
           {"se_null", null_accepts.se()},
           {"se_far", far_rejects.se()},
           {"null_accepts", RateJson(null_accepts)},
           {"far_rejects", RateJson(far_rejects)},
           {"privacy_audit", audit.ToJson()},
           {"wall_time_seconds", wall_time_seconds}};
  if (spec.keep_verdicts) {
    const auto names = [](const std::vector<TestVerdict>& verdicts) {
      std::vector<std::string> out;
      for (TestVerdict v : verdicts) out.emplace_back(VerdictName(v));
      return out;
    };
    out["null_verdicts"] = names(null_verdicts);
    out["far_verdicts"] = names(far_verdicts);
  }
  return out;
}

std::string TrialReport::CsvHeader() {
  return "model,k,alpha,eps1,eps2,delta,n1,n2,accept_rate_null,"
         "reject_rate_far,se_null,se_far,seed";
}

std::string TrialReport::CsvRow() const {
  const GridPoint& p = spec.point;
  return absl::StrFormat(
      "%s,%d,%s,%s,%s,%s,%d,%d,%.6f,%.6f,%.6f,%.6f,%d",
      std::string(ModelName(p.model)), p.k, FormatDouble(p.alpha),
      FormatDouble(p.eps1), FormatDouble(p.eps2), FormatDouble(p.delta),
      samples.n1, samples.n2, null_accepts.rate(), far_rejects.rate(),
      null_accepts.se(), far_rejects.se(), spec.seed);
}

absl::StatusOr<TrialReport> RunExperiment(
    const ExperimentSpec& spec, const CalibrationRecord& calibration) {
  RETURN_IF_ERROR(spec.point.Validate());
  if (spec.trials < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("trials must be at least 1, got %d", spec.trials));
  }
  if (!(calibration.point == spec.point)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "calibration record is for %s, experiment is %s",
        calibration.point.ToJson().dump(), spec.point.ToJson().dump()));
  }
  const auto start = std::chrono::steady_clock::now();
  ASSIGN_OR_RETURN(Pairs pairs, MakePairs(spec.point));
  TrialReport report;
  report.spec = spec;
  report.calibration = calibration;
  ASSIGN_OR_RETURN(report.samples,
                   RequiredSamples(spec.point, calibration.multiplier));
  const Instance instance =
      MakeInstance(spec.point, report.samples, calibration.constants);
  RETURN_IF_ERROR(ValidateInstance(instance));

  ASSIGN_OR_RETURN(report.audit,
                   PrivacyAudit(AuditInputs{
                       .model = spec.point.model,
                       .eps1 = spec.point.eps1,
                       .eps2 = spec.point.eps2,
                       .delta = spec.point.delta,
                       .n1 = report.samples.n1,
                       .n2 = report.samples.n2,
                       .mu1 = IsShuffle(spec.point.model)
                                  ? std::optional<int64_t>(report.samples.mu1)
                                  : std::nullopt,
                       .mu2 = IsShuffle(spec.point.model)
                                  ? std::optional<int64_t>(report.samples.mu2)
                                  : std::nullopt,
                       .central_sensitivity = instance.central.sensitivity}));

  ASSIGN_OR_RETURN(report.null_verdicts,
                   RunTrials(instance, pairs.null, pairs.null, spec.trials,
                             Rng(spec.seed, kNullStream), spec.jobs));
  ASSIGN_OR_RETURN(report.far_verdicts,
                   RunTrials(instance, pairs.p, pairs.q, spec.trials,
                             Rng(spec.seed, kFarStream), spec.jobs));
  report.null_accepts = Count(report.null_verdicts, TestVerdict::kAccept);
  report.far_rejects = Count(report.far_verdicts, TestVerdict::kReject);
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

void ParallelFor(int n, int jobs, const std::function<void(int)>& fn) {
  const int workers = std::clamp(jobs, 1, std::max(n, 1));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  }
  for (std::thread& t : threads) t.join();
}

}  // namespace hetclose
