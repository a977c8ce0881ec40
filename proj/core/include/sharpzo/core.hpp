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

#ifndef SHARPZO_CORE_HPP_
#define SHARPZO_CORE_HPP_

#include <Eigen/Core>

#include <array>
#include <atomic>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

namespace sharpzo {

// Parameter vectors are plain Eigen column vectors. Every module hands them
// around by value or const reference; nothing retains pointers into them.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Random streams
// ---------------------------------------------------------------------------

// Deterministic, substream-addressable RNG. A stream is identified by
// (seed, stream_id); the same pair always reproduces the same draw sequence,
// and distinct ids behave as independent streams. Streams are value types:
// copying one and replaying it yields identical draws, which is how paired
// +/- probes see matched minibatches.
//
// Gaussians come from an explicit Box-Muller transform over 53-bit uniforms
// so that the produced bytes do not depend on which C++ runtime is linked.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Stream addressed by (seed, mix(stream_id, label)). Independent of how far
  // this stream has already been consumed.
  RngStream substream(std::uint64_t label) const;

  double uniform();   // U[0, 1)
  double gaussian();  // N(0, 1)

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// dim i.i.d. N(0,1) entries drawn from `stream`. Throws std::invalid_argument
// if dim < 1.
Vector gaussian_vector(RngStream& stream, int dim);

// Purpose labels used to derive named substreams. Fixed constants: renumbering
// them changes every logged trajectory.
namespace streams {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kStage1 = 2;
inline constexpr std::uint64_t kStage2 = 3;
inline constexpr std::uint64_t kCge = 4;
inline constexpr std::uint64_t kRge = 5;
inline constexpr std::uint64_t kSample = 6;
inline constexpr std::uint64_t kEvaluate = 7;
inline constexpr std::uint64_t kFisher = 8;
}  // namespace streams

// ---------------------------------------------------------------------------
// Query accounting
// ---------------------------------------------------------------------------

enum class Stage { kStage1 = 0, kStage2 = 1, kOther = 2 };

// Counts objective evaluations. Increments are atomic so concurrent probe
// evaluation cannot lose counts. The active stage label is set by the driver
// between phases, never concurrently with evaluations.
class QueryCounter {
 public:
  void record() {
    total_.fetch_add(1, std::memory_order_relaxed);
    by_stage_[static_cast<int>(active_.load(std::memory_order_relaxed))]
        .fetch_add(1, std::memory_order_relaxed);
  }
  void set_stage(Stage stage) { active_.store(stage, std::memory_order_relaxed); }
  Stage stage() const { return active_.load(std::memory_order_relaxed); }

  std::int64_t total() const { return total_.load(std::memory_order_relaxed); }
  std::int64_t by_stage(Stage stage) const {
    return by_stage_[static_cast<int>(stage)].load(std::memory_order_relaxed);
  }
  void reset();

 private:
  std::atomic<std::int64_t> total_{0};
  std::array<std::atomic<std::int64_t>, 3> by_stage_{};
  std::atomic<Stage> active_{Stage::kOther};
};

// ---------------------------------------------------------------------------
// Objectives
// ---------------------------------------------------------------------------

// A loss the optimizer may only query pointwise. evaluate() is safe to call
// from several threads at once as long as each call uses its own stream.
class ObjectiveFunction {
 public:
  virtual ~ObjectiveFunction() = default;

  virtual int dim() const = 0;

  // One counted query. Stochastic objectives draw their minibatch (or noise)
  // from `stream`; replaying an identical stream replays the batch.
  double evaluate(const Vector& w, RngStream& stream) const;

  // Deterministic held-out diagnostic, higher is better. Not counted.
  virtual double validation_metric(const Vector& w) const = 0;

  // Known optimal loss, when the construction provides one.
  virtual std::optional<double> optimum_hint() const { return std::nullopt; }

  // Whether evaluate() depends on the stream at all.
  virtual bool stochastic() const { return false; }

  // Shared initializer so every method starts a paired run from the same
  // point: N(0, 0.02^2) entries unless the task overrides it.
  virtual Vector initial_point(RngStream& stream) const;

  QueryCounter& queries() const { return counter_; }

 protected:
  virtual double evaluate_impl(const Vector& w, RngStream& stream) const = 0;

 private:
  mutable QueryCounter counter_;
};

// ---------------------------------------------------------------------------
// Checked vector kernels
// ---------------------------------------------------------------------------

// Thin wrappers over Eigen that reject length mismatches instead of
// asserting in release builds.
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
// y += alpha * x
void axpy(double alpha, const Vector& x, Vector& y);

}  // namespace sharpzo

#endif  // SHARPZO_CORE_HPP_
