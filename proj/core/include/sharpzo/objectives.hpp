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

#ifndef SHARPZO_OBJECTIVES_HPP_
#define SHARPZO_OBJECTIVES_HPP_

#include <cstdint>
#include <memory>
#include <vector>

#include "sharpzo/core.hpp"

namespace sharpzo {

// ---------------------------------------------------------------------------
// Ill-conditioned quadratic
// ---------------------------------------------------------------------------

struct QuadraticSpec {
  int d = 32;
  double condition_number = 1.0;  // eigenvalues log-spaced in [1, this]
  double noise_std = 0.0;         // additive Gaussian loss noise per query
  bool rotated = false;           // apply a seeded orthogonal basis change
  std::uint64_t seed = 0;         // shapes the minimizer and the rotation
};

// L(w) = 1/2 (w - w*)^T H (w - w*) (+ noise). Eigenvalues hit both interval
// endpoints, so the curvature bounds are exactly 1 and condition_number.
class QuadraticObjective : public ObjectiveFunction {
 public:
  explicit QuadraticObjective(const QuadraticSpec& spec);

  int dim() const override { return spec_.d; }
  double validation_metric(const Vector& w) const override;
  std::optional<double> optimum_hint() const override { return 0.0; }
  bool stochastic() const override { return spec_.noise_std > 0.0; }

  const Vector& minimizer() const { return w_star_; }
  double pl_constant() const { return 1.0; }
  double smoothness() const { return spec_.condition_number; }
  double noise_free_loss(const Vector& w) const;
  Vector exact_gradient(const Vector& w) const;

 protected:
  double evaluate_impl(const Vector& w, RngStream& stream) const override;

 private:
  QuadraticSpec spec_;
  Vector eigenvalues_;
  Vector w_star_;
  Matrix basis_;  // empty unless rotated
};

std::unique_ptr<QuadraticObjective> make_quadratic(const QuadraticSpec& spec);

// ---------------------------------------------------------------------------
// Two-basin landscape
// ---------------------------------------------------------------------------

struct TwoBasinSpec {
  int d = 8;
  double curvature_ratio = 50.0;  // sharp-well curvature over flat-well
  double depth_gap = 0.05;        // how much deeper the sharp well sits
  std::uint64_t seed = 0;         // orientation of the basin axis
  // Center the shared initializer on the sharp minimum instead of the
  // origin. Escape-vs-stay experiments need every method to start inside
  // the sharp basin; the N(0, 0.02^2) spread is kept either way.
  bool start_in_sharp = false;
};

// Smooth everywhere: a soft minimum of two quadratic wells. The sharp well
// is the global minimum at value -depth_gap; the flat well sits at 0. The
// sharp curvature carries a 2% construction margin so the measured trace
// ratio clears curvature_ratio.
class TwoBasinObjective : public ObjectiveFunction {
 public:
  explicit TwoBasinObjective(const TwoBasinSpec& spec);

  int dim() const override { return spec_.d; }
  double validation_metric(const Vector& w) const override;
  std::optional<double> optimum_hint() const override {
    return -spec_.depth_gap;
  }

  const Vector& sharp_center() const { return sharp_center_; }
  const Vector& flat_center() const { return flat_center_; }
  // 0 = sharp basin, 1 = flat basin (ties go to flat).
  int which_basin(const Vector& w) const;

  Vector initial_point(RngStream& stream) const override;

 protected:
  double evaluate_impl(const Vector& w, RngStream& stream) const override;

 private:
  TwoBasinSpec spec_;
  Vector sharp_center_;
  Vector flat_center_;
  double sharp_curvature_;
  double flat_curvature_;
};

std::unique_ptr<TwoBasinObjective> make_two_basin(const TwoBasinSpec& spec);

// ---------------------------------------------------------------------------
// Synthetic prompt-tuning task
// ---------------------------------------------------------------------------

struct PromptTaskSpec {
  int d = 32;         // trainable prompt parameters
  int m = 256;        // embedding width
  int classes = 4;    // K
  int samples = 200;  // labeled points
  int minibatch = 32;
  double sample_noise = 0.3;
  std::uint64_t seed = 0;
};

// A fixed linear projection A maps the low-dimensional prompt w into
// embedding space; logits are per-class block means of (x .* (p0 + A w)).
// Half the blocks of p0 start sign-flipped, so the zero-shot prompt
// misclassifies those classes and training has headroom. evaluate() is
// minibatch cross-entropy (genuine subsampling from the stream);
// validation_metric is full-data accuracy.
class PromptTaskObjective : public ObjectiveFunction {
 public:
  explicit PromptTaskObjective(const PromptTaskSpec& spec);

  int dim() const override { return spec_.d; }
  double validation_metric(const Vector& w) const override {
    return accuracy(w);
  }
  bool stochastic() const override { return true; }

  double accuracy(const Vector& w) const;  // argmax ties -> lowest class
  double full_loss(const Vector& w) const;
  double baseline_accuracy() const { return baseline_accuracy_; }
  double baseline_loss() const { return baseline_loss_; }

 protected:
  double evaluate_impl(const Vector& w, RngStream& stream) const override;

 private:
  Vector prompt_for(const Vector& w) const;
  void class_logits(const Vector& x, const Vector& prompt, double* out) const;
  double cross_entropy(const std::vector<int>& indices,
                       const Vector& prompt) const;

  PromptTaskSpec spec_;
  Matrix projection_;           // m x d
  Vector base_prompt_;          // p0
  std::vector<Vector> points_;
  std::vector<int> labels_;
  std::vector<int> block_of_;   // embedding dim -> class block
  double baseline_accuracy_ = 0.0;
  double baseline_loss_ = 0.0;
};

std::unique_ptr<PromptTaskObjective> make_prompt_task(const PromptTaskSpec& spec);

}  // namespace sharpzo

#endif  // SHARPZO_OBJECTIVES_HPP_
