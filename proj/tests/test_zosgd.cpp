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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sharpzo/estimators.hpp"
#include "sharpzo/zosgd.hpp"
#include "test_support.hpp"

using namespace sharpzo;
using testing::vec;

TEST_CASE("a flat objective leaves the iterate bitwise unchanged") {
  auto obj = testing::constant(3, 7.5);
  ZoState state;
  state.w = vec({1.0, -2.0, 3.0});
  ZoStepOptions options;
  for (int t = 0; t < 5; ++t) {
    RngStream stream(11, static_cast<std::uint64_t>(t));
    ZoStepRecord rec = zo_step(state, obj, options, stream);
    CHECK(rec.grad_norm == 0.0);
    CHECK(rec.queries == 2);
    CHECK(rec.mean_probe_loss == 7.5);
  }
  CHECK(state.w == vec({1.0, -2.0, 3.0}));
  CHECK(state.t == 5);
}

TEST_CASE("one forced-direction step computes the exact update") {
  // Sphere in 1d, u = (1), mu = 0.5: the central difference recovers the
  // derivative w exactly, so the step is w - eta * w with no estimator error.
  auto obj = testing::sphere(1);
  ZoState state;
  state.w = vec({1.0});
  std::vector<Vector> directions = {vec({1.0})};
  ZoStepOptions options;
  options.eta = 0.1;
  options.mu = 0.5;
  options.forced_directions = &directions;
  RngStream stream(0, 0);
  ZoStepRecord rec = zo_step(state, obj, options, stream);
  CHECK(state.w[0] == 1.0 - 0.1 * 1.0);  // exactly 0.9
  // Probes were L(1.5) = 1.125 and L(0.5) = 0.125.
  CHECK(rec.mean_probe_loss == 0.625);
  CHECK(rec.grad_norm == 1.0);
  CHECK(rec.queries == 2);
  CHECK(state.t == 1);
}

TEST_CASE("zo_step is exactly one masked probe estimate applied to w") {
  auto obj = testing::diag_quadratic(vec({1.0, 3.0, 0.5, 2.0}));
  Vector w0 = vec({0.3, -1.1, 2.2, 0.7});
  PruneMask mask;
  mask.active = {1, 0, 1, 1};

  ZoState state;
  state.w = w0;
  state.mask = mask;
  ZoStepOptions options;
  options.eta = 0.02;
  options.mu = 1e-3;
  options.q = 2;
  RngStream step_stream(31, 4);
  RngStream replay = step_stream;  // value copy preserves the whole sequence
  ZoStepRecord rec = zo_step(state, obj, options, step_stream);

  RgeOptions rge;
  rge.q = 2;
  rge.mask = &mask;
  RngStream manual_stream = replay.substream(streams::kRge);
  GradientEstimate g = rge_estimate(obj, w0, 1e-3, rge, manual_stream);

  Vector expected = w0 - 0.02 * g.grad;
  CHECK(state.w == expected);
  CHECK(rec.grad_norm == g.grad.norm());
  CHECK(rec.mean_probe_loss == g.mean_probe_loss);
  CHECK(rec.queries == g.queries);
  CHECK(rec.queries == 4);
}

TEST_CASE("frozen coordinates keep their exact bit patterns") {
  // Coupled quadratic so every active update would love to move everything.
  auto obj = testing::FunctionObjective(4, [](const Vector& w) {
    double s = w.sum();
    return 0.5 * w.squaredNorm() + 0.25 * s * s;
  });
  ZoState state;
  state.w = vec({0.123456789, -0.987654321, 0.5, -0.25});
  state.mask.active = {1, 0, 1, 0};
  Vector before = state.w;

  ZoStepOptions options;
  options.eta = 0.05;
  for (int t = 0; t < 50; ++t) {
    RngStream stream(77, static_cast<std::uint64_t>(t));
    zo_step(state, obj, options, stream);
  }
  CHECK(state.w[1] == before[1]);
  CHECK(state.w[3] == before[3]);
  CHECK(state.w[0] != before[0]);
  CHECK(state.w[2] != before[2]);
}

TEST_CASE("the literal direction variant does leak into frozen coordinates") {
  auto obj = testing::sphere(2);
  std::vector<Vector> directions = {vec({1.0, 1.0})};

  auto run = [&](bool literal) {
    ZoState state;
    state.w = vec({1.0, 1.0});
    state.mask.active = {1, 0};
    ZoStepOptions options;
    options.eta = 0.1;
    options.mu = 0.5;
    options.literal_probe_direction = literal;
    options.forced_directions = &directions;
    RngStream stream(5, 0);
    zo_step(state, obj, options, stream);
    return state.w;
  };

  Vector masked = run(false);
  Vector literal = run(true);
  CHECK(masked[1] == 1.0);   // frozen under the default contract
  CHECK(literal[1] != 1.0);  // raw direction writes through the mask
  // Probes are masked either way, so the active coordinate moves identically.
  CHECK(masked[0] == literal[0]);
}

TEST_CASE("same seed, same trajectory") {
  auto run = [] {
    auto obj = testing::diag_quadratic(vec({1.0, 4.0, 9.0}));
    ZoState state;
    state.w = vec({1.0, 1.0, 1.0});
    ZoStepOptions options;
    options.eta = 0.01;
    for (int t = 0; t < 20; ++t) {
      RngStream stream(123, static_cast<std::uint64_t>(t));
      zo_step(state, obj, options, stream);
    }
    return state.w;
  };
  Vector a = run();
  Vector b = run();
  CHECK(a == b);
}

TEST_CASE("descent on the sphere: 40 steps halve the loss on nearly all seeds") {
  int halved = 0;
  for (int seed = 0; seed < 100; ++seed) {
    auto obj = testing::sphere(4);
    ZoState state;
    state.w = vec({1.0, -1.0, 1.0, -1.0});
    double initial = 0.5 * state.w.squaredNorm();
    ZoStepOptions options;
    options.eta = 0.05;
    for (int t = 0; t < 40; ++t) {
      RngStream stream(static_cast<std::uint64_t>(seed),
                       static_cast<std::uint64_t>(t));
      zo_step(state, obj, options, stream);
    }
    if (0.5 * state.w.squaredNorm() < 0.5 * initial) ++halved;
  }
  CHECK(halved >= 90);
}

TEST_CASE("query accounting: 2q per step plus 2 d batches per rebuild") {
  auto obj = testing::diag_quadratic(vec({1.0, 2.0, 3.0, 4.0, 5.0}));
  ZoState state;
  state.w = Vector::Ones(5);
  state.t = 10;

  MaskRefreshOptions refresh;
  refresh.transition_step = 10;
  refresh.batches = 3;
  RngStream refresh_stream(9, 0);
  MaskRefreshRecord rr = maybe_refresh_mask(state, obj, refresh, refresh_stream);
  CHECK(rr.refreshed);
  CHECK(rr.queries == 2 * 5 * 3);
  CHECK(obj.queries().total() == 30);

  ZoStepOptions options;
  options.q = 3;
  RngStream step_stream(9, 1);
  ZoStepRecord sr = zo_step(state, obj, options, step_stream);
  CHECK(sr.queries == 6);
  CHECK(obj.queries().total() == 36);
}

TEST_CASE("mask rebuild schedule fires at entry and every period") {
  auto obj = testing::diag_quadratic(vec({1.0, 2.0, 3.0, 4.0}));
  MaskRefreshOptions options;
  options.transition_step = 100;
  options.period = 20;

  auto refreshed_at = [&](int t, bool with_mask) {
    ZoState state;
    state.w = vec({0.1, 0.2, 0.3, 0.4});
    state.t = t;
    if (with_mask) state.mask = PruneMask::all_active(4);
    RngStream stream(1, static_cast<std::uint64_t>(t));
    return maybe_refresh_mask(state, obj, options, stream).refreshed;
  };

  CHECK(refreshed_at(100, false));      // stage entry, empty mask
  CHECK(refreshed_at(100, true));       // stage entry, t == transition
  CHECK_FALSE(refreshed_at(101, true));
  CHECK_FALSE(refreshed_at(119, true)); // one short of the period
  CHECK(refreshed_at(120, true));
  CHECK_FALSE(refreshed_at(121, true));
  CHECK(refreshed_at(140, true));       // every period, not just the first
  CHECK_FALSE(refreshed_at(95, true));  // before the transition: leave it be
  CHECK(refreshed_at(95, false));       // ...unless there is no mask at all
}

TEST_CASE("rebuild replaces the mask using the current iterate") {
  auto obj = testing::diag_quadratic(vec({1.0, 2.0, 3.0, 4.0}));
  ZoState state;
  // Coordinate gradients are (0, 10, 15, 20), so coordinate 1 carries the
  // weakest curvature among the loaded ones: its standardized proxy is
  // negative and w^2 amplifies it below the zero score of coordinate 0.
  state.w = vec({0.0, 5.0, 5.0, 5.0});
  state.t = 0;
  MaskRefreshOptions options;
  options.sparsity = 0.25;
  RngStream stream(3, 0);
  MaskRefreshRecord rec = maybe_refresh_mask(state, obj, options, stream);
  CHECK(rec.refreshed);
  CHECK(state.mask.size() == 4);
  CHECK(state.mask.active_count() == 3);
  CHECK_FALSE(state.mask.is_active(1));
  CHECK(state.mask.is_active(0));
}

TEST_CASE("magnitude mode rebuilds for free") {
  auto obj = testing::sphere(4);
  ZoState state;
  state.w = vec({-3.0, 0.5, 2.0, -1.0});
  state.t = 0;
  MaskRefreshOptions options;
  options.mode = PruningMode::kMagnitude;
  options.sparsity = 0.5;
  RngStream stream(4, 0);
  MaskRefreshRecord rec = maybe_refresh_mask(state, obj, options, stream);
  CHECK(rec.refreshed);
  CHECK(rec.queries == 0);
  CHECK(obj.queries().total() == 0);
  PruneMask expected = magnitude_mask(state.w, 0.5);
  CHECK(state.mask.active == expected.active);
}

TEST_CASE("disabled pruning pins an all-active mask and never queries") {
  auto obj = testing::sphere(3);
  ZoState state;
  state.w = Vector::Ones(3);
  state.t = 0;
  MaskRefreshOptions options;
  options.mode = PruningMode::kNone;
  RngStream stream(6, 0);
  MaskRefreshRecord rec = maybe_refresh_mask(state, obj, options, stream);
  CHECK_FALSE(rec.refreshed);
  CHECK(rec.queries == 0);
  CHECK(state.mask.active_count() == 3);
  state.t = 200;  // would be a rebuild step in the other modes
  rec = maybe_refresh_mask(state, obj, options, stream);
  CHECK_FALSE(rec.refreshed);
  CHECK(obj.queries().total() == 0);
}

TEST_CASE("invalid arguments are rejected") {
  auto obj = testing::sphere(2);
  ZoState state;
  state.w = vec({1.0, 1.0});
  RngStream stream(0, 0);

  ZoStepOptions bad_eta;
  bad_eta.eta = 0.0;
  CHECK_THROWS_AS(zo_step(state, obj, bad_eta, stream), std::invalid_argument);

  ZoState mismatched;
  mismatched.w = vec({1.0, 1.0});
  mismatched.mask.active = {1, 0, 1};
  ZoStepOptions options;
  CHECK_THROWS_AS(zo_step(mismatched, obj, options, stream),
                  std::invalid_argument);

  MaskRefreshOptions bad_period;
  bad_period.period = 0;
  CHECK_THROWS_AS(maybe_refresh_mask(state, obj, bad_period, stream),
                  std::invalid_argument);
}
