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


// Command-line front end: `qsd <task> scenario.json`, `qsd run
// scenario.json` (any task) and `qsd suite <dir>`.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qsd/scenario.hpp"

namespace {

struct CommonFlags {
  std::string out;
  std::string format = "human";
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iter;
  std::optional<std::size_t> cap;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--out", f.out, "Write the report to this file");
  app->add_option("--format", f.format, "human | json | csv")
      ->check(CLI::IsMember({"human", "json", "csv"}));
  app->add_option("--tol", f.tol, "Certificate tolerance")
      ->check(CLI::PositiveNumber);
  app->add_option("--seed", f.seed, "Seed for randomized searches");
  app->add_option("--max-iter", f.max_iter, "Iteration limit")
      ->check(CLI::PositiveNumber);
  app->add_option("--cap", f.cap, "Dimension cap for tensor powers")
      ->check(CLI::PositiveNumber);
}

qsd::OptionOverrides overrides_of(const CommonFlags& f) {
  return {f.tol, f.seed, f.max_iter, f.cap};
}

int emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) {
    std::cerr << "error: cannot write " << out << "\n";
    return static_cast<int>(qsd::ExitCode::kValidation);
  }
  file << text;
  return 0;
}

int run_file(const std::string& path, const std::string& required_task,
             const CommonFlags& f) {
  try {
    qsd::Scenario s = qsd::parse_scenario_file(path);
    if (!required_task.empty() && s.task != required_task) {
      throw qsd::Error(qsd::ErrorCode::kValidationError,
                       path + ": scenario task is '" + s.task + "', not '" +
                           required_task + "'");
    }
    qsd::apply_overrides(s, overrides_of(f));
    const qsd::Report r = qsd::run_scenario(s);
    const std::string text =
        qsd::format_report(r, qsd::parse_report_format(f.format));
    const qsd::ExitCode code = qsd::report_exit_code(r);
    if (code == qsd::ExitCode::kNoConvergence) {
      std::cerr << text;  // partial report
      if (!f.out.empty()) emit(text, f.out);
      return static_cast<int>(code);
    }
    if (const int w = emit(text, f.out); w != 0) return w;
    return static_cast<int>(code);
  } catch (const qsd::Error& e) {
    std::cerr << "error [" << qsd::error_code_name(e.code()) << "]: "
              << e.what() << "\n";
    return static_cast<int>(qsd::exit_code_for(e.code()));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qsd: quantum state discrimination toolkit"};
  app.set_version_flag("--version", std::string(QSD_VERSION));
  app.require_subcommand(1);

  CommonFlags flags;
  std::string scenario_path;
  std::string chosen_task;

  for (const std::string& task : qsd::scenario_tasks()) {
    CLI::App* sub = app.add_subcommand(task, "Run a '" + task + "' scenario");
    sub->add_option("scenario", scenario_path, "Scenario file")->required();
    add_common(sub, flags);
    sub->callback([&chosen_task, task] { chosen_task = task; });
  }
  CLI::App* run = app.add_subcommand("run", "Run a scenario of any task");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  add_common(run, flags);

  std::string suite_dir;
  std::string manifest;
  int jobs = 1;
  CLI::App* suite = app.add_subcommand("suite", "Run every scenario in a directory");
  suite->add_option("directory", suite_dir, "Scenario directory")->required();
  suite->add_option("--manifest", manifest,
                    "Manifest listing the scenarios (default: all *.json)");
  suite->add_option("--jobs", jobs, "Concurrent scenarios")
      ->check(CLI::PositiveNumber);
  add_common(suite, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(qsd::ExitCode::kParse);
  }

  if (*suite) {
    try {
      std::optional<std::filesystem::path> m;
      if (!manifest.empty()) m = manifest;
      const auto rows =
          qsd::run_suite(suite_dir, m, jobs, overrides_of(flags));
      if (const int w = emit(qsd::suite_csv(rows), flags.out); w != 0) return w;
      for (const auto& r : rows) {
        if (!r.passed) {
          std::cerr << "FAILED " << r.file << ": " << r.status << " "
                    << r.message << "\n";
        }
      }
      const bool all = std::all_of(rows.begin(), rows.end(),
                                   [](const auto& r) { return r.passed; });
      return all ? 0 : static_cast<int>(qsd::ExitCode::kExpectationMismatch);
    } catch (const qsd::Error& e) {
      std::cerr << "error [" << qsd::error_code_name(e.code()) << "]: "
                << e.what() << "\n";
      return static_cast<int>(qsd::exit_code_for(e.code()));
    }
  }
  return run_file(scenario_path, *run ? std::string() : chosen_task, flags);
}
