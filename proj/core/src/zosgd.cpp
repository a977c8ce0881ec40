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

#include "sharpzo/zosgd.hpp"

#include <cmath>

#include "sharpzo/estimators.hpp"

namespace sharpzo {

ZoStepRecord zo_step(ZoState& state, const ObjectiveFunction& obj,
                     const ZoStepOptions& options, RngStream& stream) {
  if (!(options.eta > 0.0) || !std::isfinite(options.eta)) {
    throw std::invalid_argument("zo_step: eta must be positive");
  }
  if (!state.mask.empty() && state.mask.size() != obj.dim()) {
    throw std::invalid_argument("zo_step: mask/objective dimension mismatch");
  }

  RgeOptions rge;
  rge.q = options.q;
  rge.mask = state.mask.empty() ? nullptr : &state.mask;
  rge.literal_probe_direction = options.literal_probe_direction;
  rge.forced_directions = options.forced_directions;

  RngStream rge_stream = stream.substream(streams::kRge);
  GradientEstimate g = rge_estimate(obj, state.w, options.mu, rge, rge_stream);

  state.w -= options.eta * g.grad;
  state.t += 1;

  ZoStepRecord record;
  record.mean_probe_loss = g.mean_probe_loss;
  record.grad_norm = g.grad.norm();
  record.queries = g.queries;
  return record;
}

MaskRefreshRecord maybe_refresh_mask(ZoState& state,
                                     const ObjectiveFunction& obj,
                                     const MaskRefreshOptions& options,
                                     RngStream& stream) {
  MaskRefreshRecord record;
  if (options.mode == PruningMode::kNone) {
    if (state.mask.empty()) state.mask = PruneMask::all_active(obj.dim());
    return record;
  }
  if (options.period < 1) {
    throw std::invalid_argument("maybe_refresh_mask: period must be >= 1");
  }

  int since = state.t - options.transition_step;
  bool due = state.mask.empty() || since == 0 ||
             (since > 0 && since % options.period == 0);
  if (!due) return record;

  if (options.mode == PruningMode::kZscore) {
    RngStream fisher_stream = stream.substream(streams::kFisher);
    FisherEstimate fisher =
        fisher_diag(obj, state.w, options.mu, options.batches, fisher_stream);
    state.mask = build_mask(state.w, fisher, options.sparsity,
                            options.literal_scores);
    record.queries = fisher.queries;
  } else {
    state.mask = magnitude_mask(state.w, options.sparsity);
  }
  record.refreshed = true;
  return record;
}

}  // namespace sharpzo
