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

#include <benchmark/benchmark.h>

#include "sharpzo/cmaes.hpp"
#include "sharpzo/estimators.hpp"
#include "sharpzo/objectives.hpp"
#include "sharpzo/pruning.hpp"
#include "sharpzo/zosgd.hpp"

namespace {

using namespace sharpzo;

std::unique_ptr<QuadraticObjective> bench_objective(int d) {
  QuadraticSpec spec;
  spec.d = d;
  spec.condition_number = 100.0;
  spec.rotated = true;  // dense Hessian, so evaluation cost scales with d^2
  spec.seed = 1;
  return make_quadratic(spec);
}

// Full-coordinate estimate: 2d objective queries plus stream bookkeeping.
void BM_CoordinateGradient(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  auto obj = bench_objective(d);
  RngStream stream(7, 1);
  Vector w = gaussian_vector(stream, d);
  for (auto _ : state) {
    RngStream probe(7, 2);
    GradientEstimate est = cge_estimate(*obj, w, 1e-5, probe);
    benchmark::DoNotOptimize(est.grad.data());
  }
  state.SetItemsProcessed(state.iterations() * 2 * d);
}
BENCHMARK(BM_CoordinateGradient)->Arg(16)->Arg(64)->Arg(256);

// Random-direction estimate at fixed probe count: 2q queries regardless of d.
void BM_RandomGradient(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  auto obj = bench_objective(d);
  RngStream stream(7, 1);
  Vector w = gaussian_vector(stream, d);
  RgeOptions options;
  options.q = 4;
  for (auto _ : state) {
    RngStream probe(7, 3);
    GradientEstimate est = rge_estimate(*obj, w, 1e-3, options, probe);
    benchmark::DoNotOptimize(est.grad.data());
  }
  state.SetItemsProcessed(state.iterations() * 2 * options.q);
}
BENCHMARK(BM_RandomGradient)->Arg(16)->Arg(64)->Arg(256);

// One full search generation: sample, evaluate, adapt, plus the sharpness
// pre-pass (a coordinate gradient at the mean).
void BM_SearchGeneration(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  auto obj = bench_objective(d);
  SharpStepOptions options;
  for (auto _ : state) {
    state.PauseTiming();
    CmaState cma(Vector::Zero(d), 0.4, 16);
    RngStream gen(7, 4);
    state.ResumeTiming();
    GenerationRecord rec = sharpness_step(cma, *obj, options, gen);
    benchmark::DoNotOptimize(rec.best_fitness);
  }
}
BENCHMARK(BM_SearchGeneration)->Arg(16)->Arg(64);

// One sparse descent step at 50% active coordinates.
void BM_SparseDescentStep(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  auto obj = bench_objective(d);
  RngStream stream(7, 1);
  ZoStepOptions options;
  for (auto _ : state) {
    state.PauseTiming();
    ZoState zo;
    zo.w = gaussian_vector(stream, d);
    zo.mask = PruneMask::all_active(d);
    for (int i = 0; i < d; i += 2) zo.mask.active[static_cast<std::size_t>(i)] = 0;
    RngStream step(7, 5);
    state.ResumeTiming();
    ZoStepRecord rec = zo_step(zo, *obj, options, step);
    benchmark::DoNotOptimize(rec.grad_norm);
  }
}
BENCHMARK(BM_SparseDescentStep)->Arg(64)->Arg(256);

// Curvature scoring + mask construction, the periodic stage-2 refresh cost.
void BM_MaskBuild(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  auto obj = bench_objective(d);
  RngStream stream(7, 1);
  Vector w = gaussian_vector(stream, d);
  for (auto _ : state) {
    RngStream fisher_stream(7, 6);
    FisherEstimate estimate = fisher_diag(*obj, w, 1e-5, 1, fisher_stream);
    PruneMask mask = build_mask(w, estimate, 0.5);
    benchmark::DoNotOptimize(mask.active.data());
  }
}
BENCHMARK(BM_MaskBuild)->Arg(16)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
