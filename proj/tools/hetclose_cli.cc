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

// hetclose: command-line front end of the harness.
//
//   hetclose samples        closed-form sample sizes, no simulation
//   hetclose calibrate      find the multiplier and constants, write a record
//   hetclose simulate       run null and far trials against a record
//   hetclose sweep          grid of simulate runs from a JSON config
//   hetclose privacy-audit  certified (eps, delta) per group
//
// Exit codes: 0 success, 1 statistical or audit failure, 2 configuration
// error, 3 I/O error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "hetclose/harness.h"
#include "json.hpp"

namespace hetclose {
namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitStatistical = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

// Error carrying its exit code.
struct CliError {
  int code;
  std::string message;
};

CliError ConfigError(const absl::Status& status) {
  return CliError{kExitConfig, std::string(status.message())};
}

template <typename T>
T OrThrow(absl::StatusOr<T> value) {
  if (!value.ok()) throw ConfigError(value.status());
  return *std::move(value);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError{kExitIo, absl::StrFormat("cannot read %s", path)};
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw CliError{kExitIo, absl::StrFormat("error reading %s", path)};
  return buffer.str();
}

json ReadJson(const std::string& path) {
  const std::string text = ReadFile(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw CliError{kExitConfig,
                   absl::StrFormat("%s is not valid JSON: %s", path, e.what())};
  }
}

void EnsureParent(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(parent, ec);
  if (ec) {
    throw CliError{kExitIo, absl::StrFormat("cannot create %s: %s",
                                            parent.string(), ec.message())};
  }
}

void WriteFile(const std::string& path, const std::string& text) {
  EnsureParent(path);
  std::ofstream out(path, std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw CliError{kExitIo, absl::StrFormat("cannot write %s", path)};
}

// Appends `row`, writing `header` first when the file is new or empty.
void AppendCsv(const std::string& path, const std::string& header,
               const std::string& row) {
  EnsureParent(path);
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) ||
                     std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (fresh) out << header << '\n';
  out << row << '\n';
  out.close();
  if (!out) throw CliError{kExitIo, absl::StrFormat("cannot append to %s", path)};
}

// Options shared by every subcommand that names a grid point.
struct PointFlags {
  std::string model;
  std::string family;
  int k = 0;
  double alpha = 0;
  double eps1 = 0;
  double eps2 = 0;
  double delta = 1e-6;
  int repetitions = 3;
  int compressed_size = 0;
  std::string shuffler = "poissonized";

  void Register(CLI::App* app) {
    app->add_option("--model", model,
                    "local-private | local-public | shuffle-private | "
                    "shuffle-public | central")
        ->required();
    app->add_option("--family", family,
                    "uniform | paninski-far | zipf | two-spike (default per "
                    "model)");
    app->add_option("--k", k, "domain size")->required();
    app->add_option("--alpha", alpha, "distance parameter")->required();
    app->add_option("--eps1", eps1, "group-1 epsilon")->required();
    app->add_option("--eps2", eps2, "group-2 epsilon")->required();
    app->add_option("--delta", delta, "shuffle delta")->capture_default_str();
    app->add_option("--repetitions", repetitions,
                    "public-coin majority repetitions")->capture_default_str();
    app->add_option("--compressed-size", compressed_size,
                    "public-coin parts (0 = model default)")->capture_default_str();
    app->add_option("--shuffler", shuffler,
                    "poissonized | per-user | fixed-n")->capture_default_str();
  }

  GridPoint ToPoint() const {
    GridPoint point;
    point.model = OrThrow(ParseModel(model));
    point.family = family.empty() ? DefaultFamily(point.model)
                                  : OrThrow(ParseFamily(family));
    point.k = k;
    point.alpha = alpha;
    point.eps1 = eps1;
    point.eps2 = eps2;
    point.delta = delta;
    point.repetitions = repetitions;
    point.compressed_size = compressed_size;
    point.shuffler_mode = OrThrow(ParseShufflerMode(shuffler));
    const absl::Status status = point.Validate();
    if (!status.ok()) throw ConfigError(status);
    return point;
  }
};

// Record for a fixed multiplier with no constants to fit.
bool NeedsNoConstants(Model model) { return model == Model::kLocalPrivate; }

std::string RecordFileName(const GridPoint& p) {
  return absl::StrFormat("%s_%s_k%d_a%g_e%g_%g_d%g_r%d_L%d_%s.json",
                         std::string(ModelName(p.model)),
                         std::string(FamilyName(p.family)), p.k, p.alpha,
                         p.eps1, p.eps2, p.delta, p.repetitions,
                         p.compressed_size,
                         std::string(ShufflerModeName(p.shuffler_mode)));
}

CalibrationRecord LoadRecord(const std::string& path) {
  return OrThrow(CalibrationRecord::FromJson(ReadJson(path)));
}

// Runs one experiment and writes its outputs. Returns the exit code.
int Simulate(const ExperimentSpec& spec, const CalibrationRecord& record,
             const std::string& out_path, const std::string& csv_path) {
  absl::StatusOr<TrialReport> report = RunExperiment(spec, record);
  if (!report.ok()) throw ConfigError(report.status());
  const std::string row = report->CsvRow();
  if (!out_path.empty()) WriteFile(out_path, report->ToJson().dump(2) + "\n");
  if (!csv_path.empty()) AppendCsv(csv_path, TrialReport::CsvHeader(), row);
  std::cout << TrialReport::CsvHeader() << '\n' << row << '\n';
  if (!report->audit.pass()) {
    std::cerr << "privacy audit failed\n";
    return kExitStatistical;
  }
  return report->Meets() ? kExitOk : kExitStatistical;
}

CalibrationRecord CalibrateOrThrow(const GridPoint& point,
                                   const CalibrationOptions& options,
                                   int* exit_code) {
  absl::StatusOr<CalibrationRecord> record = Calibrate(point, options);
  if (!record.ok()) {
    // A search that never reaches the target is a statistical outcome.
    const bool statistical = absl::IsFailedPrecondition(record.status()) &&
                             !options.multiplier.has_value();
    throw CliError{statistical ? kExitStatistical : kExitConfig,
                   std::string(record.status().message())};
  }
  *exit_code = kExitOk;
  return *std::move(record);
}

void PrintSamples(const GridPoint& point, double multiplier) {
  const SampleRequirement s = OrThrow(RequiredSamples(point, multiplier));
  json out{{"point", point.ToJson()},
           {"multiplier", multiplier},
           {"n1_formula", s.n1_formula},
           {"n2_formula", s.n2_formula},
           {"n1", s.n1},
           {"n2", s.n2}};
  if (point.model == Model::kCentral) out["n2_loose"] = s.n2_loose;
  if (s.mu1 > 0) {
    out["mu1"] = s.mu1;
    out["mu2"] = s.mu2;
  }
  if (s.compressed_size > 0) out["compressed_size"] = s.compressed_size;
  std::cout << out.dump(2) << '\n';
}

// Sweep config: see docs/sweep_config.md.
int Sweep(const std::string& config_path) {
  const json config = ReadJson(config_path);
  if (!config.is_object() || !config.contains("base") ||
      !config["base"].is_object()) {
    throw CliError{kExitConfig, "sweep config needs a \"base\" object"};
  }
  const json base = config["base"];
  const json grid = config.value("grid", json::object());
  if (!grid.is_object()) {
    throw CliError{kExitConfig, "\"grid\" must map field names to arrays"};
  }
  const bool calibrate = config.value("calibrate", true);
  const std::string calibration_dir =
      config.value("calibration_dir", std::string("calibration"));
  const std::string out_csv = config.value("out_csv", std::string());
  const std::string out_dir = config.value("out_dir", std::string());
  const int trials = base.value("trials", 500);
  const uint64_t seed = base.value("seed", uint64_t{1});
  const int jobs = base.value("jobs", 1);
  CalibrationOptions options;
  options.trials = base.value("calibration_trials", trials);
  options.quantile = base.value("quantile", options.quantile);
  options.seed = seed;
  options.jobs = jobs;
  if (base.contains("multiplier")) {
    options.multiplier = base["multiplier"].get<double>();
  }

  // Cartesian product over grid entries, in key order.
  std::vector<json> points{base};
  for (const auto& [key, values] : grid.items()) {
    if (!values.is_array() || values.empty()) {
      throw CliError{kExitConfig,
                     absl::StrFormat("grid entry %s must be a non-empty array",
                                     key)};
    }
    std::vector<json> next;
    for (const json& p : points) {
      for (const json& v : values) {
        json q = p;
        q[key] = v;
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }

  int exit_code = kExitOk;
  for (const json& raw : points) {
    const GridPoint point = OrThrow(GridPoint::FromJson(raw));
    const absl::Status valid = point.Validate();
    if (!valid.ok()) throw ConfigError(valid);
    const std::string record_path =
        (std::filesystem::path(calibration_dir) / RecordFileName(point))
            .string();
    CalibrationRecord record;
    if (std::filesystem::exists(record_path)) {
      record = LoadRecord(record_path);
    } else if (calibrate) {
      int code = kExitOk;
      try {
        record = CalibrateOrThrow(point, options, &code);
      } catch (const CliError& e) {
        if (e.code != kExitStatistical) throw;
        std::cerr << e.message << '\n';
        exit_code = kExitStatistical;
        continue;
      }
      WriteFile(record_path, record.ToJson().dump(2) + "\n");
    } else {
      throw CliError{kExitConfig,
                     absl::StrFormat("no calibration record at %s and "
                                     "\"calibrate\" is false",
                                     record_path)};
    }
    ExperimentSpec spec{.point = point, .trials = trials, .seed = seed,
                        .jobs = jobs, .keep_verdicts = false};
    const std::string out_path =
        out_dir.empty() ? std::string()
                        : (std::filesystem::path(out_dir) /
                           RecordFileName(point))
                              .string();
    const int code = Simulate(spec, record, out_path, out_csv);
    if (code != kExitOk) exit_code = code;
  }
  return exit_code;
}

int Main(int argc, char** argv) {
  CLI::App app{"Closeness testing under heterogeneous differential privacy"};
  app.require_subcommand(1);

  // samples
  PointFlags samples_flags;
  double samples_multiplier = 1;
  CLI::App* samples = app.add_subcommand(
      "samples", "Print the closed-form sample sizes (no simulation)");
  samples_flags.Register(samples);
  samples->add_option("--multiplier", samples_multiplier, "constant multiplier")->capture_default_str();

  // calibrate
  PointFlags cal_flags;
  CalibrationOptions cal_options;
  std::optional<double> cal_multiplier;
  std::string cal_out;
  CLI::App* cal = app.add_subcommand(
      "calibrate", "Find the multiplier and constants for a grid point");
  cal_flags.Register(cal);
  cal->add_option("--trials", cal_options.trials, "Monte Carlo trials")->capture_default_str();
  cal->add_option("--quantile", cal_options.quantile, "null quantile")->capture_default_str();
  cal->add_option("--target", cal_options.target,
                  "required calibration rate")->capture_default_str();
  cal->add_option("--seed", cal_options.seed, "seed")->capture_default_str();
  cal->add_option("--jobs", cal_options.jobs, "worker threads")->capture_default_str();
  cal->add_option("--multiplier", cal_multiplier,
                  "fix the multiplier, fit constants only");
  cal->add_option("--max-multiplier", cal_options.max_multiplier,
                  "search limit")->capture_default_str();
  cal->add_option("--out", cal_out, "record path (default: stdout)");

  // simulate
  PointFlags sim_flags;
  ExperimentSpec sim_spec;
  std::optional<double> sim_multiplier;
  std::string sim_calibration, sim_out, sim_csv;
  bool sim_verdicts = false;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Run null and far trials against a calibration record");
  sim_flags.Register(sim);
  sim->add_option("--trials", sim_spec.trials, "trials per pair")->capture_default_str();
  sim->add_option("--seed", sim_spec.seed, "seed")->capture_default_str();
  sim->add_option("--jobs", sim_spec.jobs, "worker threads")->capture_default_str();
  sim->add_option("--multiplier", sim_multiplier,
                  "multiplier (local-private only, without a record)");
  sim->add_option("--calibration", sim_calibration, "calibration record");
  sim->add_option("--out", sim_out, "TrialReport JSON path");
  sim->add_option("--csv", sim_csv, "append the CSV summary row here");
  sim->add_flag("--verdicts", sim_verdicts, "keep per-trial verdicts");

  // sweep
  std::string sweep_config;
  CLI::App* sweep =
      app.add_subcommand("sweep", "Run a grid of experiments from JSON");
  sweep->add_option("--config", sweep_config, "sweep config path")->required();

  // privacy-audit
  PointFlags audit_flags;
  double audit_multiplier = 1;
  std::optional<int64_t> audit_n1, audit_n2, audit_mu1, audit_mu2;
  std::string audit_calibration;
  CLI::App* audit = app.add_subcommand(
      "privacy-audit", "Print the certified (eps, delta) per group");
  audit_flags.Register(audit);
  audit->add_option("--multiplier", audit_multiplier,
                    "multiplier for the sample counts")->capture_default_str();
  audit->add_option("--calibration", audit_calibration,
                    "take the multiplier from this record");
  audit->add_option("--n1", audit_n1, "override n1");
  audit->add_option("--n2", audit_n2, "override n2");
  audit->add_option("--mu1", audit_mu1, "override the group-1 noise mean");
  audit->add_option("--mu2", audit_mu2, "override the group-2 noise mean");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (samples->parsed()) {
      PrintSamples(samples_flags.ToPoint(), samples_multiplier);
      return kExitOk;
    }
    if (cal->parsed()) {
      const GridPoint point = cal_flags.ToPoint();
      cal_options.multiplier = cal_multiplier;
      int code = kExitOk;
      const CalibrationRecord record =
          CalibrateOrThrow(point, cal_options, &code);
      const std::string text = record.ToJson().dump(2) + "\n";
      if (cal_out.empty()) {
        std::cout << text;
      } else {
        WriteFile(cal_out, text);
        std::cout << absl::StrFormat(
            "multiplier %g: null accept %.4f, far reject %.4f -> %s\n",
            record.multiplier, record.null_accepts.rate(),
            record.far_rejects.rate(), cal_out);
      }
      return code;
    }
    if (sim->parsed()) {
      sim_spec.point = sim_flags.ToPoint();
      sim_spec.keep_verdicts = sim_verdicts;
      CalibrationRecord record;
      if (!sim_calibration.empty()) {
        record = LoadRecord(sim_calibration);
        if (sim_multiplier.has_value() &&
            *sim_multiplier != record.multiplier) {
          throw CliError{kExitConfig,
                         "--multiplier disagrees with the calibration record"};
        }
      } else if (sim_multiplier.has_value() &&
                 NeedsNoConstants(sim_spec.point.model)) {
        record.point = sim_spec.point;
        record.multiplier = *sim_multiplier;
      } else {
        throw CliError{kExitConfig,
                       "simulate needs --calibration (run `calibrate` first); "
                       "only local-private accepts a bare --multiplier"};
      }
      return Simulate(sim_spec, record, sim_out, sim_csv);
    }
    if (sweep->parsed()) return Sweep(sweep_config);
    if (audit->parsed()) {
      const GridPoint point = audit_flags.ToPoint();
      double multiplier = audit_multiplier;
      if (!audit_calibration.empty()) {
        const CalibrationRecord record = LoadRecord(audit_calibration);
        if (!(record.point == point)) {
          throw CliError{kExitConfig,
                         "calibration record is for a different grid point"};
        }
        multiplier = record.multiplier;
      }
      const SampleRequirement s = OrThrow(RequiredSamples(point, multiplier));
      AuditInputs inputs{.model = point.model,
                         .eps1 = point.eps1,
                         .eps2 = point.eps2,
                         .delta = point.delta,
                         .n1 = audit_n1.value_or(s.n1),
                         .n2 = audit_n2.value_or(s.n2),
                         .mu1 = audit_mu1,
                         .mu2 = audit_mu2,
                         .central_sensitivity = 4.0};
      if (point.model == Model::kShufflePrivate ||
          point.model == Model::kShufflePublic) {
        if (!inputs.mu1) inputs.mu1 = s.mu1;
        if (!inputs.mu2) inputs.mu2 = s.mu2;
      }
      const PrivacyAuditReport report = OrThrow(PrivacyAudit(inputs));
      std::cout << report.ToJson().dump(2) << '\n';
      return report.pass() ? kExitOk : kExitStatistical;
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace
}  // namespace hetclose

int main(int argc, char** argv) { return hetclose::Main(argc, argv); }
