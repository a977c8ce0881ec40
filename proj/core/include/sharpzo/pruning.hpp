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

#ifndef SHARPZO_PRUNING_HPP_
#define SHARPZO_PRUNING_HPP_

#include <cstdint>
#include <vector>

#include "sharpzo/core.hpp"

namespace sharpzo {

// Which coordinates the sparse stage is allowed to touch. Inactive
// coordinates are frozen: probes and updates leave them bitwise unchanged.
struct PruneMask {
  std::vector<std::uint8_t> active;  // 1 = trainable, 0 = frozen

  int size() const { return static_cast<int>(active.size()); }
  bool empty() const { return active.empty(); }
  bool is_active(int i) const { return active[static_cast<std::size_t>(i)] != 0; }
  int active_count() const;

  // Copy of v with inactive coordinates set to exactly 0.
  Vector apply(const Vector& v) const;

  static PruneMask all_active(int d);
};

// Z-scores with the population convention (divide by N). A zero-variance
// input maps to the all-zero vector.
Vector zscore(const Vector& v);

// Diagonal curvature proxy and the per-coordinate mean gradient it was
// built from, both averaged over `batches` independent minibatch draws.
struct FisherEstimate {
  Vector fisher;     // mean over batches of the squared coordinate gradient
  Vector mean_grad;  // mean over batches of the coordinate gradient
  int batches = 0;
  int queries = 0;
};

// Each batch is one full coordinate-wise gradient estimate under its own
// substream; costs batches * 2d queries.
FisherEstimate fisher_diag(const ObjectiveFunction& obj, const Vector& w,
                           double mu, int batches, RngStream& stream);

// Saliency ranking: score_i = w_i^2 * zscore(fisher)_i; the
// round(sparsity * d) lowest-scoring coordinates go inactive, ties resolved
// lowest index first. `literal_scores` standardizes fisher by the first
// moments of mean_grad instead of by its own moments.
PruneMask build_mask(const Vector& w, const FisherEstimate& estimate,
                     double sparsity, bool literal_scores = false);

// Same selection rule with score_i = |w_i|.
PruneMask magnitude_mask(const Vector& w, double sparsity);

}  // namespace sharpzo

#endif  // SHARPZO_PRUNING_HPP_
