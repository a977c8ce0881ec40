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

#ifndef SHARPZO_TOOLS_SPEC_PARSER_HPP_
#define SHARPZO_TOOLS_SPEC_PARSER_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sharpzo/driver.hpp"
#include "sharpzo/objectives.hpp"

namespace sharpzo::cli {

// Raised for any malformed experiment file; the message carries
// "<file>:<line>: <field diagnostic>" wherever a line is known.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ObjectiveKind { kQuadratic, kTwoBasin, kPrompt };

// Everything needed to rebuild an objective instance from scratch, so every
// worker (and every rerun) constructs its own identical copy.
struct ObjectiveDescriptor {
  ObjectiveKind kind = ObjectiveKind::kQuadratic;
  QuadraticSpec quadratic;
  TwoBasinSpec two_basin;
  PromptTaskSpec prompt;

  int dim() const;
  std::string name() const;
};

std::unique_ptr<ObjectiveFunction> make_objective(const ObjectiveDescriptor& d);

// Canonical JSON form; used in sidecar metadata and for the "same objective"
// check when reports combine logs from different runs.
nlohmann::ordered_json objective_json(const ObjectiveDescriptor& d);

// One method section of the experiment file: a named preset plus any
// hyperparameter overrides, already folded into a RunConfig. The per-run
// fields (d, seed, step and query budgets) are stamped in at execution time.
struct MethodPlan {
  std::string name;
  RunConfig config;
  bool cold = false;         // skip the search stage: descent from w0 directly
  bool pure_search = false;  // search stage only: the transition never fires
};

struct ExperimentSpec {
  ObjectiveDescriptor objective;
  std::vector<MethodPlan> methods;
  std::vector<std::uint64_t> seeds;
  std::int64_t budget = 0;  // query budget per run; 0 = step-bounded only
  int total_steps = 0;      // 0 = derived from the query budget
  std::optional<double> threshold;  // target loss for queries-to-threshold
  std::string out_dir;      // empty = resolved by the runner
};

// Parses and fully validates an experiment file. Throws SpecError with a
// line/field diagnostic on the first problem found.
ExperimentSpec parse_experiment_spec(const std::string& path);

// Same parser on in-memory text; `filename` only labels diagnostics.
ExperimentSpec parse_experiment_text(const std::string& text,
                                     const std::string& filename);

const std::vector<std::string>& method_preset_names();

}  // namespace sharpzo::cli

#endif  // SHARPZO_TOOLS_SPEC_PARSER_HPP_
