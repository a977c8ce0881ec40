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

#include "sharpzo/estimators.hpp"

#include <cmath>

namespace sharpzo {
namespace {

void check_probe_inputs(const ObjectiveFunction& obj, const Vector& w,
                        double mu) {
  if (mu <= 0.0 || !std::isfinite(mu)) {
    throw std::invalid_argument("estimator: smoothing radius must be positive, got " +
                                std::to_string(mu));
  }
  if (w.size() != obj.dim()) {
    throw std::invalid_argument("estimator: point length " +
                                std::to_string(w.size()) +
                                " does not match objective dimension " +
                                std::to_string(obj.dim()));
  }
  if (!w.allFinite()) {
    throw std::invalid_argument("estimator: point has non-finite entries");
  }
}

}  // namespace

GradientEstimate cge_estimate(const ObjectiveFunction& obj, const Vector& w,
                              double mu, RngStream& stream) {
  check_probe_inputs(obj, w, mu);
  const int d = obj.dim();

  GradientEstimate out;
  out.kind = EstimatorKind::kCoordinate;
  out.mu = mu;
  out.grad = Vector::Zero(d);

  Vector probe = w;
  double loss_sum = 0.0;
  for (int i = 0; i < d; ++i) {
    // Same substream on both sides: matched minibatches per coordinate.
    RngStream plus_stream = stream.substream(i);
    RngStream minus_stream = plus_stream;

    probe[i] = w[i] + mu;
    double lp = obj.evaluate(probe, plus_stream);
    probe[i] = w[i] - mu;
    double lm = obj.evaluate(probe, minus_stream);
    probe[i] = w[i];

    if (!std::isfinite(lp) || !std::isfinite(lm)) {
      throw EstimationFailure(
          "cge_estimate: non-finite loss at coordinate " + std::to_string(i),
          i);
    }
    out.grad[i] = (lp - lm) / (2.0 * mu);
    loss_sum += lp + lm;
  }
  out.queries = 2 * d;
  out.mean_probe_loss = loss_sum / static_cast<double>(2 * d);
  return out;
}

GradientEstimate rge_estimate(const ObjectiveFunction& obj, const Vector& w,
                              double mu, const RgeOptions& options,
                              RngStream& stream) {
  check_probe_inputs(obj, w, mu);
  const int d = obj.dim();
  if (options.q < 1) {
    throw std::invalid_argument("rge_estimate: q must be >= 1, got " +
                                std::to_string(options.q));
  }
  if (options.mask != nullptr && options.mask->size() != d) {
    throw std::invalid_argument("rge_estimate: mask length " +
                                std::to_string(options.mask->size()) +
                                " does not match dimension " +
                                std::to_string(d));
  }
  if (options.forced_directions != nullptr &&
      static_cast<int>(options.forced_directions->size()) != options.q) {
    throw std::invalid_argument(
        "rge_estimate: forced_directions size must equal q");
  }

  GradientEstimate out;
  out.kind = EstimatorKind::kRandom;
  out.mu = mu;
  out.grad = Vector::Zero(d);

  double loss_sum = 0.0;
  for (int j = 0; j < options.q; ++j) {
    RngStream probe_rng = stream.substream(j);
    Vector u;
    if (options.forced_directions != nullptr) {
      u = (*options.forced_directions)[static_cast<std::size_t>(j)];
    } else {
      RngStream direction_stream = probe_rng.substream(0);
      u = gaussian_vector(direction_stream, d);
    }
    if (u.size() != d) {
      throw std::invalid_argument("rge_estimate: direction length mismatch");
    }

    Vector probe_dir = options.mask != nullptr ? options.mask->apply(u) : u;
    RngStream plus_stream = probe_rng.substream(1);
    RngStream minus_stream = plus_stream;

    double lp = obj.evaluate(w + mu * probe_dir, plus_stream);
    double lm = obj.evaluate(w - mu * probe_dir, minus_stream);
    if (!std::isfinite(lp) || !std::isfinite(lm)) {
      throw EstimationFailure("rge_estimate: non-finite loss at probe " +
                                  std::to_string(j),
                              -1);
    }

    double quotient = (lp - lm) / (2.0 * mu);
    const Vector& out_dir =
        (options.mask != nullptr && options.literal_probe_direction)
            ? u
            : probe_dir;
    out.grad += quotient * out_dir;
    loss_sum += lp + lm;
  }
  out.grad /= static_cast<double>(options.q);
  out.queries = 2 * options.q;
  out.mean_probe_loss = loss_sum / static_cast<double>(2 * options.q);
  return out;
}

Vector sam_perturbation(const Vector& grad, double rho, double tau) {
  if (rho < 0.0 || !std::isfinite(rho)) {
    throw std::invalid_argument("sam_perturbation: rho must be >= 0");
  }
  if (!grad.allFinite()) {
    throw std::invalid_argument("sam_perturbation: gradient has non-finite entries");
  }
  double norm = grad.norm();
  if (rho == 0.0 || norm < tau) {
    return Vector::Zero(grad.size());
  }
  return (rho / norm) * grad;
}

}  // namespace sharpzo
