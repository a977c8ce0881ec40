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

#ifndef SHARPZO_TOOLS_EXPERIMENT_HPP_
#define SHARPZO_TOOLS_EXPERIMENT_HPP_

#include <iosfwd>
#include <string>

#include "spec_parser.hpp"

namespace sharpzo::cli {

struct RunExperimentOptions {
  std::string out_override;  // --out; beats the env var and the spec file
  int jobs = 1;
  bool timings = false;  // keep measured wall_ms in the CSV column
};

// Sparse descent straight from w0 — the cold-start baseline with no
// distribution-search stage. Uses the same root stream layout as the full
// two-stage run, so a shared seed gives bit-identical initial iterates.
// Stage-1 fields of the config are ignored; the log records transition 0.
RunLog cold_zosgd_run(const RunConfig& config, const ObjectiveFunction& obj);

// The per-run config for one (method, seed) cell: the plan's hyperparameters
// with the objective dimension, seed, and budgets stamped in.
RunConfig stamped_config(const ExperimentSpec& spec, const MethodPlan& plan,
                         std::uint64_t seed);

// Output directory precedence: --out, then $SHARPZO_OUT_DIR, then the spec's
// `out` key, then "runs".
std::string resolve_out_dir(const ExperimentSpec& spec,
                            const RunExperimentOptions& options);

// Executes every (method, seed) run in a worker pool, writes per-run CSV and
// metadata files, then rebuilds the summary table, its JSON mirror, and the
// convergence chart purely from the CSV files on disk. Returns a process
// exit code; failures leave no summary behind.
int run_experiment(const ExperimentSpec& spec,
                   const RunExperimentOptions& options, std::ostream& out,
                   std::ostream& err);

}  // namespace sharpzo::cli

#endif  // SHARPZO_TOOLS_EXPERIMENT_HPP_
