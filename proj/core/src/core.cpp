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

#include "sharpzo/core.hpp"

#include <cmath>

namespace sharpzo {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  // Expand (seed, stream_id) into enough entropy to fill the engine state.
  std::uint64_t a = splitmix64(seed ^ splitmix64(stream_id));
  std::uint64_t b = splitmix64(a);
  std::uint64_t c = splitmix64(b);
  std::uint64_t d = splitmix64(c);
  std::seed_seq seq{
      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
      static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(d >> 32)};
  engine_.seed(seq);
}

RngStream RngStream::substream(std::uint64_t label) const {
  std::uint64_t child = splitmix64(splitmix64(stream_id_) ^ (label + kGolden));
  return RngStream(seed_, child);
}

double RngStream::uniform() {
  // 53-bit mantissa in [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 shifted into (0, 1] so the log is finite.
  double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  double r = std::sqrt(-2.0 * std::log(u1));
  double phi = 2.0 * M_PI * u2;
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

Vector gaussian_vector(RngStream& stream, int dim) {
  if (dim < 1) {
    throw std::invalid_argument("gaussian_vector: dim must be >= 1, got " +
                                std::to_string(dim));
  }
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = stream.gaussian();
  return v;
}

void QueryCounter::reset() {
  total_.store(0, std::memory_order_relaxed);
  for (auto& s : by_stage_) s.store(0, std::memory_order_relaxed);
  active_.store(Stage::kOther, std::memory_order_relaxed);
}

double ObjectiveFunction::evaluate(const Vector& w, RngStream& stream) const {
  if (w.size() != dim()) {
    throw std::invalid_argument(
        "ObjectiveFunction::evaluate: point has length " +
        std::to_string(w.size()) + ", objective dimension is " +
        std::to_string(dim()));
  }
  counter_.record();
  return evaluate_impl(w, stream);
}

Vector ObjectiveFunction::initial_point(RngStream& stream) const {
  return 0.02 * gaussian_vector(stream, dim());
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dot: length mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  return a.dot(b);
}

double norm2(const Vector& a) { return a.norm(); }

void axpy(double alpha, const Vector& x, Vector& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("axpy: length mismatch (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
  }
  y += alpha * x;
}

}  // namespace sharpzo
