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

#include "sharpzo/estimators.hpp"
#include "test_support.hpp"

using namespace sharpzo;
using testing::vec;

TEST_CASE("coordinate estimator is exact on the sphere") {
  auto obj = testing::sphere(2);
  RngStream stream(1, 0);
  GradientEstimate g = cge_estimate(obj, vec({3, 4}), 1e-5, stream);
  CHECK(g.grad[0] == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(g.grad[1] == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(g.queries == 4);
  CHECK(obj.queries().total() == 4);
}

TEST_CASE("coordinate estimator carries the cubic curvature bias") {
  testing::FunctionObjective cubic(1, [](const Vector& w) {
    return w[0] * w[0] * w[0];
  });
  RngStream stream(1, 0);
  GradientEstimate g = cge_estimate(cubic, vec({1}), 1e-3, stream);
  CHECK(std::abs(g.grad[0] - 3.000001) < 1e-9);
}

TEST_CASE("coordinate estimator returns exact zero on a constant") {
  auto obj = testing::constant(5, 2.5);
  RngStream stream(9, 0);
  GradientEstimate g = cge_estimate(obj, Vector::Zero(5), 1e-4, stream);
  for (int i = 0; i < 5; ++i) CHECK(g.grad[i] == 0.0);
}

TEST_CASE("matched probe streams cancel additive loss noise exactly") {
  Vector h = vec({1, 4, 9});
  testing::NoisyObjective noisy(3, [h](const Vector& w) {
    return 0.5 * (h.array() * w.array().square()).sum();
  }, 3.0);
  auto clean = testing::diag_quadratic(h);

  Vector w = vec({1, -2, 0.5});
  RngStream s1(11, 0);
  RngStream s2(11, 0);
  GradientEstimate gn = cge_estimate(noisy, w, 1e-5, s1);
  GradientEstimate gc = cge_estimate(clean, w, 1e-5, s2);
  CHECK(gn.grad == gc.grad);
}

TEST_CASE("non-finite probes raise EstimationFailure with the coordinate") {
  testing::FunctionObjective bad(3, [](const Vector& w) {
    if (w[1] > 0.5) return std::numeric_limits<double>::quiet_NaN();
    return w.squaredNorm();
  });
  RngStream stream(1, 0);
  try {
    (void)cge_estimate(bad, Vector::Zero(3), 1.0, stream);
    FAIL("expected EstimationFailure");
  } catch (const EstimationFailure& e) {
    CHECK(e.coordinate() == 1);
  }
}

TEST_CASE("estimators reject bad smoothing radii") {
  auto obj = testing::sphere(2);
  RngStream stream(1, 0);
  CHECK_THROWS_AS((void)cge_estimate(obj, vec({1, 1}), 0.0, stream),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)cge_estimate(obj, vec({1, 1}), -1e-3, stream),
                  std::invalid_argument);
  RgeOptions opts;
  CHECK_THROWS_AS((void)rge_estimate(obj, vec({1, 1}), 0.0, opts, stream),
                  std::invalid_argument);
}

TEST_CASE("random estimator with a forced direction on a linear loss") {
  auto obj = testing::linear(vec({1, 0}));
  std::vector<Vector> directions{vec({1, 1})};
  RgeOptions opts;
  opts.q = 1;
  opts.forced_directions = &directions;
  RngStream stream(1, 0);
  GradientEstimate g = rge_estimate(obj, Vector::Zero(2), 1e-3, opts, stream);
  CHECK(g.grad[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.grad[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.queries == 2);
}

TEST_CASE("random estimator consumes exactly 2q queries") {
  auto obj = testing::sphere(6);
  RgeOptions opts;
  opts.q = 5;
  RngStream stream(3, 0);
  GradientEstimate g = rge_estimate(obj, Vector::Ones(6), 1e-3, opts, stream);
  CHECK(g.queries == 10);
  CHECK(obj.queries().total() == 10);
}

TEST_CASE("dense random estimator is unbiased on a linear loss") {
  auto obj = testing::linear(vec({1, 0}));
  RgeOptions opts;
  RngStream stream(7, 0);
  const int n = 100000;
  Vector mean = Vector::Zero(2);
  for (int i = 0; i < n; ++i) {
    RngStream sub = stream.substream(static_cast<std::uint64_t>(i));
    mean += rge_estimate(obj, Vector::Zero(2), 1e-3, opts, sub).grad;
  }
  mean /= n;
  CHECK(std::abs(mean[0] - 1.0) <= 0.05);
  CHECK(std::abs(mean[1] - 0.0) <= 0.05);
}

TEST_CASE("random estimator mean matches the exact gradient within 5 SE") {
  Vector h = vec({1, 2, 3, 4});
  auto obj = testing::diag_quadratic(h);
  Vector w = vec({1, -1, 0.5, 2});
  Vector exact = h.cwiseProduct(w);

  RgeOptions opts;
  RngStream stream(13, 0);
  const int n = 100000;
  Vector sum = Vector::Zero(4), sum_sq = Vector::Zero(4);
  for (int i = 0; i < n; ++i) {
    RngStream sub = stream.substream(static_cast<std::uint64_t>(i));
    Vector g = rge_estimate(obj, w, 1e-4, opts, sub).grad;
    sum += g;
    sum_sq += g.cwiseProduct(g);
  }
  for (int i = 0; i < 4; ++i) {
    double mean = sum[i] / n;
    double var = sum_sq[i] / n - mean * mean;
    double se = std::sqrt(var / n);
    CHECK(std::abs(mean - exact[i]) <= 5.0 * se);
  }
}

TEST_CASE("masked estimator freezes inactive coordinates exactly") {
  auto obj = testing::sphere(6);
  PruneMask mask = PruneMask::all_active(6);
  mask.active = {1, 0, 1, 0, 1, 0};
  RgeOptions opts;
  opts.mask = &mask;
  RngStream stream(21, 0);
  for (int i = 0; i < 50; ++i) {
    RngStream sub = stream.substream(static_cast<std::uint64_t>(i));
    Vector g = rge_estimate(obj, Vector::Ones(6), 1e-3, opts, sub).grad;
    CHECK(g[1] == 0.0);
    CHECK(g[3] == 0.0);
    CHECK(g[5] == 0.0);
  }
}

TEST_CASE("literal probe direction leaks into frozen coordinates") {
  auto obj = testing::sphere(4);
  PruneMask mask = PruneMask::all_active(4);
  mask.active = {1, 1, 0, 0};
  RgeOptions opts;
  opts.mask = &mask;
  opts.literal_probe_direction = true;
  RngStream stream(22, 0);
  bool leaked = false;
  for (int i = 0; i < 20 && !leaked; ++i) {
    RngStream sub = stream.substream(static_cast<std::uint64_t>(i));
    Vector g = rge_estimate(obj, Vector::Ones(4), 1e-3, opts, sub).grad;
    leaked = g[2] != 0.0 || g[3] != 0.0;
  }
  CHECK(leaked);
}

TEST_CASE("masked estimator has lower total variance than the dense one") {
  Vector h = vec({1, 2, 3, 4, 5, 6, 7, 8});
  auto obj = testing::diag_quadratic(h);
  Vector w = Vector::Ones(8);
  PruneMask mask = PruneMask::all_active(8);
  mask.active = {1, 1, 1, 1, 0, 0, 0, 0};

  const int n = 10000;
  auto total_variance = [&](const PruneMask* m) {
    RgeOptions opts;
    opts.mask = m;
    RngStream stream(31, m == nullptr ? 0 : 1);
    Vector sum = Vector::Zero(8), sum_sq = Vector::Zero(8);
    for (int i = 0; i < n; ++i) {
      RngStream sub = stream.substream(static_cast<std::uint64_t>(i));
      Vector g = rge_estimate(obj, w, 1e-3, opts, sub).grad;
      sum += g;
      sum_sq += g.cwiseProduct(g);
    }
    double total = 0.0;
    for (int i = 0; i < 8; ++i) {
      double mean = sum[i] / n;
      total += sum_sq[i] / n - mean * mean;
    }
    return total;
  };

  CHECK(total_variance(&mask) < total_variance(nullptr));
}

TEST_CASE("worst-case perturbation frozen values and norm") {
  Vector eps = sam_perturbation(vec({3, 4}), 0.1);
  CHECK(eps[0] == doctest::Approx(0.06).epsilon(1e-12));
  CHECK(eps[1] == doctest::Approx(0.08).epsilon(1e-12));
  CHECK(eps.norm() == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("worst-case perturbation degenerate cases give exact zero") {
  Vector zero_rho = sam_perturbation(vec({3, 4}), 0.0);
  CHECK(zero_rho == Vector::Zero(2));
  Vector tiny = sam_perturbation(vec({1e-13, 0}), 0.1);
  CHECK(tiny == Vector::Zero(2));
}

TEST_CASE("worst-case perturbation norm is rho for any non-degenerate input") {
  RngStream stream(5, 0);
  for (int i = 0; i < 100; ++i) {
    Vector g = gaussian_vector(stream, 16);
    Vector eps = sam_perturbation(g, 0.37);
    CHECK(std::abs(eps.norm() - 0.37) < 1e-12);
  }
}
