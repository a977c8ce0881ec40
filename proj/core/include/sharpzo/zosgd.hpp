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

#ifndef SHARPZO_ZOSGD_HPP_
#define SHARPZO_ZOSGD_HPP_

#include <vector>

#include "sharpzo/core.hpp"
#include "sharpzo/pruning.hpp"

namespace sharpzo {

// Sparse first-order-style descent driven by random-direction probes.
struct ZoState {
  Vector w;
  int t = 0;        // global step index, continues the stage-1 count
  PruneMask mask;   // empty until the first refresh builds it
};

struct ZoStepOptions {
  double eta = 1e-3;  // step size
  double mu = 1e-3;   // probe radius
  int q = 1;          // probe directions averaged per step
  bool literal_probe_direction = false;  // see RgeOptions
  const std::vector<Vector>* forced_directions = nullptr;  // test seam
};

struct ZoStepRecord {
  double mean_probe_loss = 0;  // free estimate of L near w
  double grad_norm = 0;
  int queries = 0;  // exactly 2q
};

// w <- w - eta * masked RGE. Inactive coordinates receive an exactly-zero
// gradient, so their stored values never change bit patterns (default
// direction handling). Advances state.t by one.
ZoStepRecord zo_step(ZoState& state, const ObjectiveFunction& obj,
                     const ZoStepOptions& options, RngStream& stream);

enum class PruningMode { kZscore, kMagnitude, kNone };

struct MaskRefreshOptions {
  PruningMode mode = PruningMode::kZscore;
  double sparsity = 0.5;
  double mu = 1e-5;           // probe radius for the curvature proxy
  int batches = 1;            // minibatch draws averaged into the proxy
  int transition_step = 0;    // T_c: step at which stage 2 began
  int period = 200;           // K: steps between rebuilds
  bool literal_scores = false;  // see build_mask
};

struct MaskRefreshRecord {
  bool refreshed = false;
  int queries = 0;  // 2 * d * batches on a zscore rebuild, else 0
};

// Rebuilds the mask at stage entry (empty mask or t == transition_step) and
// every `period` steps after the transition; otherwise a no-op. kNone keeps
// every coordinate active and never queries.
MaskRefreshRecord maybe_refresh_mask(ZoState& state,
                                     const ObjectiveFunction& obj,
                                     const MaskRefreshOptions& options,
                                     RngStream& stream);

}  // namespace sharpzo

#endif  // SHARPZO_ZOSGD_HPP_
