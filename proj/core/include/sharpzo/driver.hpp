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

#ifndef SHARPZO_DRIVER_HPP_
#define SHARPZO_DRIVER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sharpzo/core.hpp"
#include "sharpzo/zosgd.hpp"

namespace sharpzo {

enum class Stage1Mode { kSharp, kNaive };
enum class Stage2Init { kMean, kBestCandidate };

struct RunConfig {
  int d = 32;
  int total_steps = 1000;  // T; stage-1 generations and stage-2 steps combined
  int population = 40;     // S
  double rho = 0.1;
  double sigma0 = 0.4;
  double mu_cge = 1e-5;
  double mu_rge = 1e-3;
  int q = 1;
  double eta = 1e-3;
  int mask_period = 200;  // K
  double sparsity = 0.5;
  int fisher_batches = 0;  // 0 = auto: 4 if stochastic objective, else 1
  int patience = 10;
  double improve_tol = 0.01;
  std::uint64_t seed = 0;
  PruningMode stage2_pruning = PruningMode::kZscore;
  Stage1Mode stage1_mode = Stage1Mode::kSharp;
  Stage2Init stage2_init = Stage2Init::kMean;
  int stage1_cap = 500;          // hard generation cap for stage 1
  std::int64_t query_budget = 0; // 0 = bounded by total_steps only
  bool literal_probe_direction = false;
  bool literal_fisher_scores = false;
};

struct StepRow {
  int step = 0;
  int stage = 0;  // 1 or 2
  std::int64_t queries = 0;  // cumulative after the step
  double train_loss = 0;     // stage 1: best fitness; stage 2: mean probe loss
  double val_metric = 0;
  double sigma = 0;          // 0 during stage 2
  int active_coords = 0;
  double wall_ms = 0;
};

struct RunLog {
  RunConfig config;  // echoed with auto fields resolved
  std::vector<StepRow> rows;
  int transition_step = 0;  // T_c: step where transition_check fired (or cap)
  Vector final_w;
  double final_val = 0;
  std::int64_t total_queries = 0;
  std::int64_t stage1_queries = 0;
  std::int64_t stage2_queries = 0;
  int mask_refreshes = 0;

  // Canonical byte serialization. Timings are zeroed unless requested so a
  // rerun with the same config and seed reproduces the bytes exactly.
  std::string to_csv(bool include_timings = false) const;
};

// True when none of the last `patience` entries improves on the running best
// of the entries before them by more than improve_tol. Needs at least
// patience + 1 entries; shorter histories never fire.
bool transition_check(const std::vector<double>& history, double improve_tol,
                      int patience);

struct RateFit {
  double rate = 0;  // least-squares slope of log(loss - l_star) per step
  double r2 = 0;
  int points = 0;
};

// Fit over entries [begin, end) of a per-step loss sequence. Throws
// std::invalid_argument when the window is malformed or a gap is not
// strictly positive.
RateFit fit_linear_rate(const std::vector<double>& losses, double l_star,
                        int begin, int end);

// Same fit on a run's deterministic loss view (negated validation metric),
// windowed by step numbers [begin_step, end_step).
RateFit fit_linear_rate(const RunLog& log, double l_star, int begin_step,
                        int end_step);

// Executes the two-stage loop: sharpness-aware (or plain) CMA-ES generations
// until the transition-, cap-, or budget-rule fires, then masked ZO-SGD with
// periodic mask refreshes until the step or query budget is exhausted.
RunLog run(const RunConfig& config, const ObjectiveFunction& obj);

}  // namespace sharpzo

#endif  // SHARPZO_DRIVER_HPP_
