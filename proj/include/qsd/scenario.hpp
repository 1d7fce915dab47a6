// Copyright 2026 The qsd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Scenario files ("qsd-scenario/1") describe one task with its inputs;
// running a scenario yields a Report ("qsd-report/1"). A suite runs every
// scenario in a directory and summarizes the outcomes as CSV.
//
// Exit codes: 0 ok, 1 expectation mismatch, 2 parse error, 3 validation
// error, 4 solver did not converge, 5 task infeasible for the input.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qsd/errors.hpp"
#include "qsd/minerror.hpp"
#include "qsd/operator_core.hpp"
#include "qsd/serialize.hpp"

namespace qsd {

inline constexpr const char* kScenarioSchema = "qsd-scenario/1";
inline constexpr const char* kReportSchema = "qsd-report/1";
inline constexpr const char* kManifestSchema = "qsd-manifest/1";

enum class ExitCode : int {
  kOk = 0,
  kExpectationMismatch = 1,
  kParse = 2,
  kValidation = 3,
  kNoConvergence = 4,
  kInfeasible = 5,
};

ExitCode exit_code_for(ErrorCode code);

// All task names accepted in the "task" field.
const std::vector<std::string>& scenario_tasks();

struct ScenarioOptions {
  double tol = kDefaultCertTolerance;  // certificate tolerance
  std::uint64_t seed = 1;
  int max_iter = kDefaultMaxIterations;
  std::size_t cap = kDefaultDimensionCap;
};

// Command-line overrides applied on top of the file's options.
struct OptionOverrides {
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iter;
  std::optional<std::size_t> cap;
};

struct Scenario {
  std::string name;
  std::string task;
  std::optional<Ensemble> ensemble;
  Json params = Json::object();
  ScenarioOptions options;
  Json expect;  // null when absent
  Json source;  // the scenario as read, echoed into the report
  std::filesystem::path base_dir;  // for relative paths in params
  std::vector<std::string> warnings;
};

// Throws ParseError (with line or field) or ValidationError.
Scenario parse_scenario(const std::string& text,
                        const std::filesystem::path& base_dir = {});
Scenario parse_scenario_file(const std::filesystem::path& path);
void apply_overrides(Scenario& scenario, const OptionOverrides& overrides);

struct Expectation {
  bool checked = false;
  bool passed = true;
  std::vector<std::string> failures;
  bool operator==(const Expectation&) const = default;
};

struct Report {
  std::string schema = kReportSchema;
  std::string toolkit_version;
  std::string name;
  std::string task;
  std::string status = "ok";  // "ok" or "no-convergence"
  std::string primary;        // key of the headline entry in `values`
  std::map<std::string, double> values;
  std::map<std::string, bool> flags;
  std::map<std::string, double> certificate;  // empty when not applicable
  std::map<std::string, double> residuals;
  std::vector<std::string> notes;
  Json details = Json::object();
  Json scenario;
  Expectation expectation;
  double wall_time_ms = 0.0;
  bool operator==(const Report&) const = default;
};

// Solver errors propagate as qsd::Error; a result whose certificate fails
// is returned with status "no-convergence".
Report run_scenario(const Scenario& scenario);
ExitCode report_exit_code(const Report& report);

Json report_to_json(const Report& report);
Report report_from_json(const Json& j);

enum class ReportFormat { kHuman, kJson, kCsv };
ReportFormat parse_report_format(const std::string& name);
std::string format_report(const Report& report, ReportFormat format);

struct SuiteRow {
  std::string file;
  std::string name;
  std::string task;
  std::string status;  // "ok", "no-convergence" or an error code name
  int exit_code = 0;
  std::string primary;
  std::optional<double> value;
  bool passed = false;
  std::string message;
};

// Runs the scenarios listed in the manifest (or every *.json file in the
// directory other than the manifest when none is given); rows are ordered
// by file name. Throws ParseError only for an unreadable manifest.
std::vector<SuiteRow> run_suite(const std::filesystem::path& directory,
                                const std::optional<std::filesystem::path>&
                                    manifest,
                                int jobs, const OptionOverrides& overrides);
std::string suite_csv(const std::vector<SuiteRow>& rows);

}  // namespace qsd
