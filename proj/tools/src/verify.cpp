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

#include "verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sharpzo/driver.hpp"
#include "sharpzo/estimators.hpp"
#include "sharpzo/objectives.hpp"
#include "sharpzo/pruning.hpp"

namespace sharpzo::cli {
namespace {

using Failure = std::optional<std::string>;

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Failure coordinate_estimator_exact_on_quadratics() {
  int case_id = 0;
  for (int d : {3, 8, 16, 33}) {
    for (double condition : {1.0, 10.0, 100.0}) {
      for (bool rotated : {false, true}) {
        ++case_id;
        QuadraticSpec spec;
        spec.d = d;
        spec.condition_number = condition;
        spec.rotated = rotated;
        spec.seed = static_cast<std::uint64_t>(case_id);
        auto obj = make_quadratic(spec);

        RngStream point_stream(900 + static_cast<std::uint64_t>(case_id), 1);
        Vector w = gaussian_vector(point_stream, d);
        RngStream probe_stream(900 + static_cast<std::uint64_t>(case_id), 2);
        GradientEstimate est = cge_estimate(*obj, w, 1e-5, probe_stream);
        Vector exact = obj->exact_gradient(w);
        double rel = (est.grad - exact).norm() /
                     std::max(exact.norm(), 1e-12);
        if (!(rel <= 1e-8)) {
          return "d=" + std::to_string(d) + " cond=" + num(condition) +
                 (rotated ? " rotated" : "") + ": relative error " + num(rel);
        }
      }
    }
  }
  return std::nullopt;
}

Failure mask_cardinality_and_determinism() {
  for (int d : {1, 5, 17, 64}) {
    for (double sparsity : {0.0, 0.25, 0.5, 0.9, 1.0}) {
      RngStream stream(77, static_cast<std::uint64_t>(d));
      Vector w = gaussian_vector(stream, d);
      FisherEstimate estimate;
      estimate.fisher = gaussian_vector(stream, d).cwiseAbs();
      estimate.mean_grad = gaussian_vector(stream, d);
      estimate.batches = 1;

      int expect = d - static_cast<int>(std::llround(sparsity * d));
      PruneMask scored = build_mask(w, estimate, sparsity);
      PruneMask scored_again = build_mask(w, estimate, sparsity);
      PruneMask by_magnitude = magnitude_mask(w, sparsity);
      if (scored.active_count() != expect) {
        return "curvature mask d=" + std::to_string(d) + " sparsity=" +
               num(sparsity) + ": " + std::to_string(scored.active_count()) +
               " active, expected " + std::to_string(expect);
      }
      if (by_magnitude.active_count() != expect) {
        return "magnitude mask d=" + std::to_string(d) + " sparsity=" +
               num(sparsity) + ": " +
               std::to_string(by_magnitude.active_count()) +
               " active, expected " + std::to_string(expect);
      }
      if (scored.active != scored_again.active) {
        return "mask build is not deterministic at d=" + std::to_string(d) +
               " sparsity=" + num(sparsity);
      }
    }
  }
  return std::nullopt;
}

Failure masked_probes_freeze_coordinates() {
  QuadraticSpec spec;
  spec.d = 12;
  spec.condition_number = 25.0;
  spec.rotated = true;
  spec.seed = 5;
  auto obj = make_quadratic(spec);

  PruneMask mask;
  mask.active.assign(12, 0);
  for (int i = 0; i < 12; i += 2) mask.active[static_cast<std::size_t>(i)] = 1;

  RngStream stream(31, 4);
  Vector w = gaussian_vector(stream, 12);
  RgeOptions options;
  options.q = 3;
  options.mask = &mask;
  RngStream est_stream(31, 5);
  GradientEstimate est = rge_estimate(*obj, w, 1e-3, options, est_stream);
  for (int i = 0; i < 12; ++i) {
    if (!mask.is_active(i) && est.grad[i] != 0.0) {
      return "frozen coordinate " + std::to_string(i) +
             " received gradient " + num(est.grad[i]);
    }
  }

  Vector projected = mask.apply(w);
  for (int i = 0; i < 12; ++i) {
    double want = mask.is_active(i) ? w[i] : 0.0;
    if (projected[i] != want) {
      return "mask projection altered coordinate " + std::to_string(i);
    }
  }
  return std::nullopt;
}

Failure score_standardization_moments() {
  for (int n : {7, 100}) {
    RngStream stream(12, static_cast<std::uint64_t>(n));
    Vector v = 3.0 * gaussian_vector(stream, n) + Vector::Constant(n, 40.0);
    Vector z = zscore(v);
    double mean = z.mean();
    double var = (z.array() - mean).square().sum() / n;
    if (std::abs(mean) > 1e-12) {
      return "n=" + std::to_string(n) + ": standardized mean " + num(mean);
    }
    if (std::abs(std::sqrt(var) - 1.0) > 1e-12) {
      return "n=" + std::to_string(n) + ": standardized std " +
             num(std::sqrt(var));
    }
  }
  Vector constant = Vector::Constant(9, 4.25);
  if (zscore(constant).cwiseAbs().maxCoeff() != 0.0) {
    return "constant input did not standardize to zero";
  }
  return std::nullopt;
}

Failure sharpness_offset_norm() {
  RngStream stream(3, 9);
  Vector grad = gaussian_vector(stream, 24);
  double rho = 0.35;
  Vector eps = sam_perturbation(grad, rho);
  if (std::abs(eps.norm() - rho) > 1e-12 * rho) {
    return "offset norm " + num(eps.norm()) + ", expected " + num(rho);
  }
  if ((eps - rho * grad / grad.norm()).norm() > 1e-12) {
    return "offset is not aligned with the gradient";
  }
  if (sam_perturbation(grad, 0.0).cwiseAbs().maxCoeff() != 0.0) {
    return "rho = 0 did not give a zero offset";
  }
  return std::nullopt;
}

Failure run_reproducibility() {
  QuadraticSpec spec;
  spec.d = 6;
  spec.condition_number = 10.0;
  spec.seed = 2;

  RunConfig config;
  config.d = 6;
  config.total_steps = 60;
  config.population = 8;
  config.stage1_cap = 12;
  config.mask_period = 10;
  config.seed = 11;

  auto first_obj = make_quadratic(spec);
  std::string first = run(config, *first_obj).to_csv();
  auto second_obj = make_quadratic(spec);
  std::string second = run(config, *second_obj).to_csv();
  if (first != second) {
    return "two identically seeded runs serialized differently";
  }
  if (first.empty()) {
    return "run produced an empty log";
  }
  return std::nullopt;
}

}  // namespace

int run_verification(std::ostream& out) {
  struct Check {
    const char* name;
    std::function<Failure()> body;
  };
  const std::vector<Check> checks = {
      {"coordinate estimator exact on quadratics",
       coordinate_estimator_exact_on_quadratics},
      {"mask cardinality and determinism", mask_cardinality_and_determinism},
      {"masked probes freeze pruned coordinates",
       masked_probes_freeze_coordinates},
      {"score standardization moments", score_standardization_moments},
      {"sharpness offset norm", sharpness_offset_norm},
      {"end-to-end run reproducibility", run_reproducibility},
  };

  int failures = 0;
  for (const Check& check : checks) {
    Failure failure;
    try {
      failure = check.body();
    } catch (const std::exception& ex) {
      failure = std::string("exception: ") + ex.what();
    }
    if (failure) {
      ++failures;
      out << "FAIL  " << check.name << ": " << *failure << "\n";
    } else {
      out << "PASS  " << check.name << "\n";
    }
  }
  out << (failures == 0 ? "all checks passed"
                        : std::to_string(failures) + " check(s) failed")
      << "\n";
  return failures;
}

}  // namespace sharpzo::cli
