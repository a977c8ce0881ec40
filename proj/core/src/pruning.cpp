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

#include "sharpzo/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sharpzo/estimators.hpp"

namespace sharpzo {
namespace {

// Indices of the k lowest scores; ties broken toward the lower index.
std::vector<int> lowest_k(const Vector& scores, int k) {
  std::vector<int> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] < scores[b]; });
  order.resize(static_cast<std::size_t>(k));
  return order;
}

PruneMask mask_from_scores(const Vector& scores, double sparsity) {
  const int d = static_cast<int>(scores.size());
  if (d < 1) throw std::invalid_argument("mask: empty score vector");
  if (!(sparsity >= 0.0 && sparsity <= 1.0)) {
    throw std::invalid_argument("mask: sparsity must lie in [0, 1], got " +
                                std::to_string(sparsity));
  }
  if (!scores.allFinite()) {
    throw std::invalid_argument("mask: scores have non-finite entries");
  }
  const int prune = static_cast<int>(std::llround(sparsity * d));
  PruneMask mask = PruneMask::all_active(d);
  for (int i : lowest_k(scores, prune)) mask.active[static_cast<std::size_t>(i)] = 0;
  return mask;
}

}  // namespace

int PruneMask::active_count() const {
  int n = 0;
  for (std::uint8_t a : active) n += (a != 0);
  return n;
}

Vector PruneMask::apply(const Vector& v) const {
  if (v.size() != size()) {
    throw std::invalid_argument("PruneMask::apply: length mismatch (" +
                                std::to_string(v.size()) + " vs " +
                                std::to_string(size()) + ")");
  }
  Vector out = v;
  for (int i = 0; i < size(); ++i) {
    if (!is_active(i)) out[i] = 0.0;
  }
  return out;
}

PruneMask PruneMask::all_active(int d) {
  if (d < 1) throw std::invalid_argument("PruneMask: dimension must be >= 1");
  PruneMask mask;
  mask.active.assign(static_cast<std::size_t>(d), 1);
  return mask;
}

Vector zscore(const Vector& v) {
  const auto n = v.size();
  if (n < 1) throw std::invalid_argument("zscore: empty vector");
  if (!v.allFinite()) {
    throw std::invalid_argument("zscore: non-finite entries");
  }
  double mean = v.mean();
  double var = (v.array() - mean).square().sum() / static_cast<double>(n);
  double std_dev = std::sqrt(var);
  if (std_dev == 0.0) return Vector::Zero(n);
  return (v.array() - mean) / std_dev;
}

FisherEstimate fisher_diag(const ObjectiveFunction& obj, const Vector& w,
                           double mu, int batches, RngStream& stream) {
  if (batches < 1) {
    throw std::invalid_argument("fisher_diag: batches must be >= 1, got " +
                                std::to_string(batches));
  }
  const int d = obj.dim();
  FisherEstimate out;
  out.fisher = Vector::Zero(d);
  out.mean_grad = Vector::Zero(d);
  for (int b = 0; b < batches; ++b) {
    RngStream batch_stream = stream.substream(b);
    GradientEstimate g = cge_estimate(obj, w, mu, batch_stream);
    out.fisher += g.grad.cwiseProduct(g.grad);
    out.mean_grad += g.grad;
    out.queries += g.queries;
  }
  out.fisher /= static_cast<double>(batches);
  out.mean_grad /= static_cast<double>(batches);
  out.batches = batches;
  return out;
}

PruneMask build_mask(const Vector& w, const FisherEstimate& estimate,
                     double sparsity, bool literal_scores) {
  if (w.size() != estimate.fisher.size()) {
    throw std::invalid_argument("build_mask: weight/fisher length mismatch");
  }
  Vector standardized;
  if (literal_scores) {
    // Literal variant: standardize the squared-gradient vector by the first
    // moments of the gradient itself.
    const Vector& g = estimate.mean_grad;
    double mean = g.mean();
    double std_dev = std::sqrt(
        (g.array() - mean).square().sum() / static_cast<double>(g.size()));
    standardized = std_dev == 0.0
                       ? Vector::Zero(g.size())
                       : Vector(((estimate.fisher.array() - mean) / std_dev).matrix());
  } else {
    standardized = zscore(estimate.fisher);
  }
  Vector scores = w.array().square() * standardized.array();
  return mask_from_scores(scores, sparsity);
}

PruneMask magnitude_mask(const Vector& w, double sparsity) {
  return mask_from_scores(w.cwiseAbs(), sparsity);
}

}  // namespace sharpzo
