// Copyright 2026 The SharpZO Authors.
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

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "experiment.hpp"
#include "report.hpp"
#include "spec_parser.hpp"
#include "verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Forward-only two-stage optimization: run experiment specs, compare "
      "logs, self-check the numerics."};
  app.require_subcommand(1);

  std::string spec_path;
  sharpzo::cli::RunExperimentOptions run_options;
  CLI::App* run_cmd = app.add_subcommand(
      "run", "Execute every method x seed in a spec file and summarize");
  run_cmd->add_option("spec", spec_path, "experiment spec file")->required();
  run_cmd->add_option("--out", run_options.out_override,
                      "output directory (overrides $SHARPZO_OUT_DIR and the "
                      "spec's own `out` key)");
  run_cmd->add_option("--jobs", run_options.jobs, "worker threads")
      ->check(CLI::Range(1, 256));
  run_cmd->add_flag("--timings", run_options.timings,
                    "record wall-clock timings in the CSV (off by default so "
                    "reruns are byte-identical)");

  std::vector<std::string> log_paths;
  sharpzo::cli::ReportOptions report_options;
  CLI::App* report_cmd =
      app.add_subcommand("report", "Compare previously written run logs");
  report_cmd->add_option("logs", log_paths, "run CSV files")
      ->required()
      ->expected(-1);
  report_cmd->add_option(
      "--threshold", report_options.thresholds,
      "loss threshold for the queries-to-target table (repeatable)");

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Run the built-in numerical self-checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      sharpzo::cli::ExperimentSpec spec =
          sharpzo::cli::parse_experiment_spec(spec_path);
      return sharpzo::cli::run_experiment(spec, run_options, std::cout,
                                          std::cerr);
    }
    if (report_cmd->parsed()) {
      return sharpzo::cli::compare_report(log_paths, report_options,
                                          std::cout, std::cerr);
    }
    if (verify_cmd->parsed()) {
      return sharpzo::cli::run_verification(std::cout) == 0 ? 0 : 1;
    }
  } catch (const sharpzo::cli::SpecError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
