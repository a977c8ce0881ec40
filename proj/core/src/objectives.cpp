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

#include "sharpzo/objectives.hpp"

#include <Eigen/QR>

#include <cmath>

namespace sharpzo {
namespace {

constexpr double kSoftminBeta = 8.0;

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

// ---------------------------------------------------------------------------
// QuadraticObjective
// ---------------------------------------------------------------------------

QuadraticObjective::QuadraticObjective(const QuadraticSpec& spec)
    : spec_(spec) {
  require(spec.d >= 1, "quadratic: d must be >= 1");
  require(spec.condition_number >= 1.0,
          "quadratic: condition_number must be >= 1");
  require(spec.noise_std >= 0.0, "quadratic: noise_std must be >= 0");

  eigenvalues_.resize(spec.d);
  if (spec.d == 1) {
    eigenvalues_[0] = 1.0;
  } else {
    double log_kappa = std::log(spec.condition_number);
    for (int i = 0; i < spec.d; ++i) {
      eigenvalues_[i] = std::exp(log_kappa * i / (spec.d - 1));
    }
  }

  RngStream stream(spec.seed, 17);
  RngStream star_stream = stream.substream(0);
  w_star_ = gaussian_vector(star_stream, spec.d);
  if (spec.rotated) {
    Matrix raw(spec.d, spec.d);
    RngStream rot = stream.substream(1);
    for (int j = 0; j < spec.d; ++j) {
      for (int i = 0; i < spec.d; ++i) raw(i, j) = rot.gaussian();
    }
    basis_ = Eigen::HouseholderQR<Matrix>(raw).householderQ();
  }
}

double QuadraticObjective::noise_free_loss(const Vector& w) const {
  Vector v = w - w_star_;
  if (basis_.size() > 0) v = basis_.transpose() * v;
  return 0.5 * (eigenvalues_.array() * v.array().square()).sum();
}

Vector QuadraticObjective::exact_gradient(const Vector& w) const {
  Vector v = w - w_star_;
  if (basis_.size() == 0) return eigenvalues_.asDiagonal() * v;
  Vector t = basis_.transpose() * v;
  return basis_ * (eigenvalues_.asDiagonal() * t);
}

double QuadraticObjective::evaluate_impl(const Vector& w,
                                         RngStream& stream) const {
  double loss = noise_free_loss(w);
  if (spec_.noise_std > 0.0) loss += spec_.noise_std * stream.gaussian();
  return loss;
}

double QuadraticObjective::validation_metric(const Vector& w) const {
  return -noise_free_loss(w);
}

std::unique_ptr<QuadraticObjective> make_quadratic(const QuadraticSpec& spec) {
  return std::make_unique<QuadraticObjective>(spec);
}

// ---------------------------------------------------------------------------
// TwoBasinObjective
// ---------------------------------------------------------------------------

TwoBasinObjective::TwoBasinObjective(const TwoBasinSpec& spec) : spec_(spec) {
  require(spec.d >= 1, "two_basin: d must be >= 1");
  require(spec.curvature_ratio >= 1.0, "two_basin: curvature_ratio must be >= 1");
  require(spec.depth_gap > 0.0, "two_basin: depth_gap must be > 0");

  RngStream stream(spec.seed, 19);
  Vector axis = gaussian_vector(stream, spec.d);
  axis.normalize();
  sharp_center_ = axis;    // separation 2 along a seeded unit axis
  flat_center_ = -axis;
  flat_curvature_ = 1.0;
  sharp_curvature_ = 1.02 * spec.curvature_ratio;  // margin over the target ratio
}

double TwoBasinObjective::evaluate_impl(const Vector& w, RngStream&) const {
  double f_sharp =
      0.5 * sharp_curvature_ * (w - sharp_center_).squaredNorm() -
      spec_.depth_gap;
  double f_flat = 0.5 * flat_curvature_ * (w - flat_center_).squaredNorm();
  // Soft minimum, evaluated from the smaller branch for stability.
  double lo = std::min(f_sharp, f_flat);
  double hi = std::max(f_sharp, f_flat);
  return lo - std::log1p(std::exp(-kSoftminBeta * (hi - lo))) / kSoftminBeta;
}

double TwoBasinObjective::validation_metric(const Vector& w) const {
  RngStream unused;
  return -evaluate_impl(w, unused);
}

int TwoBasinObjective::which_basin(const Vector& w) const {
  double d_sharp = (w - sharp_center_).norm();
  double d_flat = (w - flat_center_).norm();
  return d_sharp < d_flat ? 0 : 1;
}

Vector TwoBasinObjective::initial_point(RngStream& stream) const {
  Vector w = ObjectiveFunction::initial_point(stream);
  if (spec_.start_in_sharp) w += sharp_center_;
  return w;
}

std::unique_ptr<TwoBasinObjective> make_two_basin(const TwoBasinSpec& spec) {
  return std::make_unique<TwoBasinObjective>(spec);
}

// ---------------------------------------------------------------------------
// PromptTaskObjective
// ---------------------------------------------------------------------------

PromptTaskObjective::PromptTaskObjective(const PromptTaskSpec& spec)
    : spec_(spec) {
  require(spec.d >= 1, "prompt_task: d must be >= 1");
  require(spec.classes >= 2, "prompt_task: need at least 2 classes");
  require(spec.m >= spec.classes, "prompt_task: m must be >= classes");
  require(spec.samples >= spec.classes, "prompt_task: need >= classes samples");
  require(spec.minibatch >= 1, "prompt_task: minibatch must be >= 1");
  require(spec.sample_noise >= 0.0, "prompt_task: sample_noise must be >= 0");

  RngStream stream(spec.seed, 23);

  block_of_.resize(static_cast<std::size_t>(spec.m));
  for (int j = 0; j < spec.m; ++j) {
    block_of_[static_cast<std::size_t>(j)] =
        static_cast<int>((static_cast<long long>(j) * spec.classes) / spec.m);
  }

  // Fixed projection, entries N(0, 1).
  projection_.resize(spec.m, spec.d);
  RngStream proj_stream = stream.substream(0);
  for (int k = 0; k < spec.d; ++k) {
    for (int j = 0; j < spec.m; ++j) projection_(j, k) = proj_stream.gaussian();
  }

  // Zero-shot prompt: all ones, with floor(K/2) seeded blocks sign-flipped.
  base_prompt_ = Vector::Ones(spec.m);
  int flips = spec.classes / 2;
  RngStream flip_stream = stream.substream(1);
  std::vector<std::uint8_t> flipped(static_cast<std::size_t>(spec.classes), 0);
  for (int f = 0; f < flips; ++f) {
    int block;
    do {
      block = static_cast<int>(flip_stream.uniform() * spec.classes);
      block = std::min(block, spec.classes - 1);
    } while (flipped[static_cast<std::size_t>(block)] != 0);
    flipped[static_cast<std::size_t>(block)] = 1;
  }
  for (int j = 0; j < spec.m; ++j) {
    if (flipped[static_cast<std::size_t>(block_of_[static_cast<std::size_t>(j)])]) {
      base_prompt_[j] = -1.0;
    }
  }

  // Point cloud: class indicator plus Gaussian spread, labels round-robin.
  RngStream data_stream = stream.substream(2);
  points_.reserve(static_cast<std::size_t>(spec.samples));
  labels_.reserve(static_cast<std::size_t>(spec.samples));
  for (int n = 0; n < spec.samples; ++n) {
    int label = n % spec.classes;
    Vector x = spec.sample_noise * gaussian_vector(data_stream, spec.m);
    for (int j = 0; j < spec.m; ++j) {
      if (block_of_[static_cast<std::size_t>(j)] == label) x[j] += 1.0;
    }
    points_.push_back(std::move(x));
    labels_.push_back(label);
  }

  baseline_accuracy_ = accuracy(Vector::Zero(spec.d));
  baseline_loss_ = full_loss(Vector::Zero(spec.d));
}

Vector PromptTaskObjective::prompt_for(const Vector& w) const {
  return base_prompt_ + projection_ * w;
}

void PromptTaskObjective::class_logits(const Vector& x, const Vector& prompt,
                                       double* out) const {
  for (int k = 0; k < spec_.classes; ++k) out[k] = 0.0;
  for (int j = 0; j < spec_.m; ++j) {
    out[block_of_[static_cast<std::size_t>(j)]] += x[j] * prompt[j];
  }
  for (int k = 0; k < spec_.classes; ++k) {
    int lo = (k * spec_.m) / spec_.classes;
    int hi = ((k + 1) * spec_.m) / spec_.classes;
    out[k] /= static_cast<double>(hi - lo);
  }
}

double PromptTaskObjective::cross_entropy(const std::vector<int>& indices,
                                          const Vector& prompt) const {
  std::vector<double> logits(static_cast<std::size_t>(spec_.classes));
  double total = 0.0;
  for (int n : indices) {
    class_logits(points_[static_cast<std::size_t>(n)], prompt, logits.data());
    double max_logit = logits[0];
    for (double l : logits) max_logit = std::max(max_logit, l);
    double denom = 0.0;
    for (double l : logits) denom += std::exp(l - max_logit);
    double target = logits[static_cast<std::size_t>(
        labels_[static_cast<std::size_t>(n)])];
    total += std::log(denom) - (target - max_logit);
  }
  return total / static_cast<double>(indices.size());
}

double PromptTaskObjective::evaluate_impl(const Vector& w,
                                          RngStream& stream) const {
  Vector prompt = prompt_for(w);
  std::vector<int> batch(static_cast<std::size_t>(spec_.minibatch));
  for (int& idx : batch) {
    idx = std::min(static_cast<int>(stream.uniform() * spec_.samples),
                   spec_.samples - 1);
  }
  return cross_entropy(batch, prompt);
}

double PromptTaskObjective::accuracy(const Vector& w) const {
  Vector prompt = prompt_for(w);
  std::vector<double> logits(static_cast<std::size_t>(spec_.classes));
  int correct = 0;
  for (std::size_t n = 0; n < points_.size(); ++n) {
    class_logits(points_[n], prompt, logits.data());
    int best = 0;
    for (int k = 1; k < spec_.classes; ++k) {
      if (logits[static_cast<std::size_t>(k)] >
          logits[static_cast<std::size_t>(best)]) {
        best = k;
      }
    }
    correct += (best == labels_[n]);
  }
  return static_cast<double>(correct) / static_cast<double>(points_.size());
}

double PromptTaskObjective::full_loss(const Vector& w) const {
  std::vector<int> all(points_.size());
  for (std::size_t n = 0; n < all.size(); ++n) all[n] = static_cast<int>(n);
  return cross_entropy(all, prompt_for(w));
}

std::unique_ptr<PromptTaskObjective> make_prompt_task(
    const PromptTaskSpec& spec) {
  return std::make_unique<PromptTaskObjective>(spec);
}

}  // namespace sharpzo
