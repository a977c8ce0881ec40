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

#ifndef SHARPZO_ESTIMATORS_HPP_
#define SHARPZO_ESTIMATORS_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "sharpzo/core.hpp"
#include "sharpzo/pruning.hpp"

namespace sharpzo {

enum class EstimatorKind { kCoordinate, kRandom };

struct GradientEstimate {
  Vector grad;
  EstimatorKind kind = EstimatorKind::kCoordinate;
  double mu = 0.0;  // smoothing radius used
  int queries = 0;  // objective evaluations consumed
  // Mean of all probe losses; a free zero-order estimate of L near w.
  double mean_probe_loss = 0.0;
};

class EstimationFailure : public std::runtime_error {
 public:
  EstimationFailure(const std::string& what, int coordinate)
      : std::runtime_error(what), coordinate_(coordinate) {}
  // Offending coordinate, or -1 when the failure is not per-coordinate.
  int coordinate() const { return coordinate_; }

 private:
  int coordinate_;
};

// Coordinate-wise central differences: grad_i = (L(w + mu e_i) - L(w - mu e_i))
// / (2 mu). Exactly 2d queries. Both probes of a coordinate replay the same
// substream so a stochastic objective sees matched minibatches. Exact on
// quadratics up to floating point. Throws EstimationFailure on a non-finite
// probe and std::invalid_argument for mu <= 0.
GradientEstimate cge_estimate(const ObjectiveFunction& obj, const Vector& w,
                              double mu, RngStream& stream);

struct RgeOptions {
  int q = 1;                     // probe directions to average
  const PruneMask* mask = nullptr;  // optional sparsity pattern
  // With a mask: probes always use the masked direction; the default output
  // direction is the masked one too, so frozen coordinates stay exactly 0.
  // literal_probe_direction keeps the raw direction on the output side.
  bool literal_probe_direction = false;
  // Injection seam for tests and `sharpzo verify`: when set, uses these
  // directions instead of sampling (size must equal q).
  const std::vector<Vector>* forced_directions = nullptr;
};

// Random-direction two-point estimate, averaged over q Gaussian probes:
// mean of [(L(w + mu u) - L(w - mu u)) / (2 mu)] * u. Exactly 2q queries,
// matched minibatches per probe pair.
GradientEstimate rge_estimate(const ObjectiveFunction& obj, const Vector& w,
                              double mu, const RgeOptions& options,
                              RngStream& stream);

// Worst-case (sharpness) offset: rho * grad / ||grad||. Degenerate inputs
// (rho == 0 or ||grad|| < tau) give the zero vector.
Vector sam_perturbation(const Vector& grad, double rho, double tau = 1e-12);

}  // namespace sharpzo

#endif  // SHARPZO_ESTIMATORS_HPP_
