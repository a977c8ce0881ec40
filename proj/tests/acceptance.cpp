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
//
// Release gate: nine end-to-end checks of the toolkit's core promises, each
// printed as a single PASS/FAIL line with its measured margin. Run with a
// criterion number as the only argument to execute just that one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "experiment.hpp"
#include "sharpzo/cmaes.hpp"
#include "sharpzo/driver.hpp"
#include "sharpzo/estimators.hpp"
#include "sharpzo/objectives.hpp"
#include "sharpzo/pruning.hpp"
#include "sharpzo/zosgd.hpp"

namespace {

using namespace sharpzo;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Exact one-sided binomial tail P(X >= x) for X ~ Binomial(n, 1/2).
double binomial_tail(int x, int n) {
  double p = 0.0;
  for (int k = x; k <= n; ++k) {
    double log_c = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                   std::lgamma(n - k + 1.0);
    p += std::exp(log_c - n * std::log(2.0));
  }
  return std::min(p, 1.0);
}

// ---------------------------------------------------------------------------
// 1. Coordinate estimator exactness on random quadratics.

Outcome criterion_estimator_exactness() {
  auto start = Clock::now();
  const double conditions[] = {1.0, 3.0, 10.0, 100.0, 1000.0};
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    QuadraticSpec spec;
    spec.d = 1 + (k * 63) / 99;  // sweeps 1..64
    spec.condition_number = conditions[k % 5];
    spec.rotated = (k % 2) == 1;
    spec.seed = static_cast<std::uint64_t>(k);
    auto obj = make_quadratic(spec);

    RngStream point_stream(5000 + static_cast<std::uint64_t>(k), 1);
    Vector w = 2.0 * gaussian_vector(point_stream, spec.d);
    RngStream probe_stream(5000 + static_cast<std::uint64_t>(k), 2);
    GradientEstimate est = cge_estimate(*obj, w, 1e-5, probe_stream);
    Vector exact = obj->exact_gradient(w);
    double rel = (est.grad - exact).norm() / exact.norm();
    worst = std::max(worst, rel);
  }
  double elapsed = seconds_since(start);
  return {worst <= 1e-8 && elapsed < 1.0,
          fmt("100 instances (d 1..64, cond 1..1000), max rel err %.2e "
              "(tol 1e-8), %.2fs (limit 1s)",
              worst, elapsed)};
}

// ---------------------------------------------------------------------------
// 2. Random-direction estimator statistics: unbiased mean, masked variance
//    strictly below dense variance at the same point.

Outcome criterion_rge_statistics() {
  auto start = Clock::now();
  QuadraticSpec spec;
  spec.d = 8;
  spec.condition_number = 10.0;
  spec.rotated = true;
  spec.seed = 4;
  auto obj = make_quadratic(spec);

  RngStream point_stream(600, 1);
  Vector w = gaussian_vector(point_stream, spec.d);
  Vector g = obj->exact_gradient(w);

  const int n = 100000;
  const int d = spec.d;
  Vector sum = Vector::Zero(d), sumsq = Vector::Zero(d);
  RgeOptions dense;
  dense.q = 1;
  RngStream dense_root(601, 1);
  for (int k = 0; k < n; ++k) {
    RngStream s = dense_root.substream(static_cast<std::uint64_t>(k));
    GradientEstimate est = rge_estimate(*obj, w, 1e-4, dense, s);
    sum += est.grad;
    sumsq += est.grad.cwiseProduct(est.grad);
  }
  double worst_z = 0.0;
  double dense_var = 0.0;
  for (int i = 0; i < d; ++i) {
    double mean = sum[i] / n;
    double var = sumsq[i] / n - mean * mean;
    dense_var += var;
    double se = std::sqrt(var / n);
    worst_z = std::max(worst_z, std::abs(mean - g[i]) / se);
  }

  PruneMask mask;
  mask.active.assign(static_cast<std::size_t>(d), 0);
  for (int i = 0; i < d; i += 2) mask.active[static_cast<std::size_t>(i)] = 1;
  RgeOptions masked = dense;
  masked.mask = &mask;
  Vector msum = Vector::Zero(d), msumsq = Vector::Zero(d);
  RngStream masked_root(602, 1);
  for (int k = 0; k < n; ++k) {
    RngStream s = masked_root.substream(static_cast<std::uint64_t>(k));
    GradientEstimate est = rge_estimate(*obj, w, 1e-4, masked, s);
    msum += est.grad;
    msumsq += est.grad.cwiseProduct(est.grad);
  }
  double masked_var = 0.0;
  for (int i = 0; i < d; ++i) {
    double mean = msum[i] / n;
    masked_var += msumsq[i] / n - mean * mean;
  }

  double elapsed = seconds_since(start);
  bool pass = worst_z <= 5.0 && masked_var < dense_var && elapsed < 30.0;
  return {pass,
          fmt("1e5 estimates: worst coordinate |mean-grad| = %.2f SE "
              "(tol 5); masked var %.3g < dense var %.3g (50%% active); "
              "%.1fs (limit 30s)",
              worst_z, masked_var, dense_var, elapsed)};
}

// ---------------------------------------------------------------------------
// 3. rho = 0 + no pruning collapses onto plain search + dense descent,
//    bit for bit.

Outcome criterion_baseline_reduction() {
  QuadraticSpec qspec;
  qspec.d = 8;
  qspec.condition_number = 10.0;
  qspec.rotated = true;
  qspec.seed = 3;

  RunConfig cfg;
  cfg.d = 8;
  cfg.total_steps = 60;
  cfg.population = 10;
  cfg.sigma0 = 0.5;
  cfg.patience = 5;
  cfg.stage1_cap = 15;
  cfg.seed = 12;
  cfg.stage2_pruning = PruningMode::kNone;

  for (Stage2Init init : {Stage2Init::kMean, Stage2Init::kBestCandidate}) {
    cfg.stage2_init = init;

    // (a) the full method with the sharpness weight turned off
    RunConfig zero_rho = cfg;
    zero_rho.rho = 0.0;
    zero_rho.stage1_mode = Stage1Mode::kSharp;
    auto obj_a = make_quadratic(qspec);
    RunLog a = run(zero_rho, *obj_a);

    // (b) the driver's plain-search mode
    RunConfig naive = cfg;
    naive.stage1_mode = Stage1Mode::kNaive;
    auto obj_b = make_quadratic(qspec);
    RunLog b = run(naive, *obj_b);

    // (c) the two baselines composed by hand from the public pieces
    auto obj_c = make_quadratic(qspec);
    obj_c->queries().reset();
    RngStream root(cfg.seed, 0);
    RngStream init_stream = root.substream(streams::kInit);
    Vector w0 = obj_c->initial_point(init_stream);
    CmaState cma(w0, cfg.sigma0, cfg.population);
    RngStream stage1_root = root.substream(streams::kStage1);
    SharpStepOptions plain;
    plain.sharpness = false;
    std::vector<double> history;
    double best_fitness = std::numeric_limits<double>::infinity();
    Vector best_w = w0;
    int t = 0;
    while (t < cfg.total_steps) {
      RngStream gen_stream =
          stage1_root.substream(static_cast<std::uint64_t>(t + 1));
      GenerationRecord rec = sharpness_step(cma, *obj_c, plain, gen_stream);
      ++t;
      if (rec.any_finite && rec.best_fitness < best_fitness) {
        best_fitness = rec.best_fitness;
        best_w = rec.best_w;
      }
      history.push_back(obj_c->validation_metric(cma.theta));
      if (transition_check(history, cfg.improve_tol, cfg.patience) ||
          t >= cfg.stage1_cap) {
        break;
      }
    }
    int composed_transition = t;
    ZoState zo;
    zo.w = init == Stage2Init::kMean ? cma.theta : best_w;
    zo.t = t;
    ZoStepOptions descend;
    descend.eta = cfg.eta;
    descend.mu = cfg.mu_rge;
    descend.q = cfg.q;
    RngStream stage2_root = root.substream(streams::kStage2);
    while (t < cfg.total_steps) {
      RngStream step_stream =
          stage2_root.substream(static_cast<std::uint64_t>(t + 1));
      zo_step(zo, *obj_c, descend, step_stream);
      t = zo.t;
    }
    Vector composed_final = composed_transition == t ? cma.theta : zo.w;

    if (a.transition_step != b.transition_step ||
        b.transition_step != composed_transition) {
      return {false, fmt("transition steps diverge: %d / %d / %d",
                         a.transition_step, b.transition_step,
                         composed_transition)};
    }
    for (int i = 0; i < cfg.d; ++i) {
      if (a.final_w[i] != b.final_w[i] || b.final_w[i] != composed_final[i]) {
        return {false, fmt("final iterates differ at coordinate %d", i)};
      }
    }
    if (a.rows.size() != b.rows.size()) {
      return {false, "row counts differ between rho=0 and plain mode"};
    }
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      const StepRow& ra = a.rows[i];
      const StepRow& rb = b.rows[i];
      bool same = ra.step == rb.step && ra.stage == rb.stage &&
                  ra.train_loss == rb.train_loss &&
                  ra.val_metric == rb.val_metric && ra.sigma == rb.sigma;
      // rho=0 still spends 2d queries per generation measuring the (zero)
      // offset; that bookkeeping difference is exactly 2d per stage-1 step.
      std::int64_t probe_overhead =
          2LL * cfg.d *
          std::min<std::int64_t>(ra.step, a.transition_step);
      if (!same || ra.queries != rb.queries + probe_overhead) {
        return {false, fmt("rows diverge at step %d", ra.step)};
      }
    }
    if (b.total_queries != obj_c->queries().total()) {
      return {false, "composed query total differs from plain mode"};
    }
  }
  return {true,
          "rho=0 run, plain-mode run, and the hand-composed baseline agree "
          "bitwise on every iterate, row, and query count (both handoff "
          "modes)"};
}

// ---------------------------------------------------------------------------
// 4. Warm start beats the cold dense baseline from the same start point.

Outcome criterion_warm_start() {
  auto start = Clock::now();
  QuadraticSpec qspec;
  qspec.d = 32;
  qspec.condition_number = 100.0;
  qspec.seed = 7;

  const std::int64_t budget = 10000;
  const int steps = static_cast<int>(budget / 2 + 1);
  int wins = 0, untaxed_wins = 0;
  std::vector<double> warm_losses, cold_losses, untaxed_losses;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    // The full method at its defaults (rho = 0.1), minus the sparsity floor:
    // the quadratic's minimizer is dense, so pruning is turned off to give
    // the two-stage method its best configuration on this objective.
    RunConfig warm;
    warm.d = 32;
    warm.seed = seed;
    warm.query_budget = budget;
    warm.total_steps = steps;
    warm.stage2_pruning = PruningMode::kNone;
    auto warm_obj = make_quadratic(qspec);
    RunLog warm_log = run(warm, *warm_obj);

    RunConfig cold = warm;
    auto cold_obj = make_quadratic(qspec);
    RunLog cold_log = cli::cold_zosgd_run(cold, *cold_obj);

    // Diagnostic third arm: the warm-start engine alone, with the sharpness
    // probes off and no handoff (pure search for the whole budget). This
    // isolates whether the mechanism or its per-generation probe cost is
    // what decides the paired comparison.
    RunConfig untaxed = warm;
    untaxed.rho = 0.0;
    untaxed.stage1_mode = Stage1Mode::kNaive;
    untaxed.stage1_cap = steps;
    untaxed.patience = steps + 1;
    auto untaxed_obj = make_quadratic(qspec);
    RunLog untaxed_log = run(untaxed, *untaxed_obj);

    double warm_loss = -warm_log.final_val;
    double cold_loss = -cold_log.final_val;
    warm_losses.push_back(warm_loss);
    cold_losses.push_back(cold_loss);
    untaxed_losses.push_back(-untaxed_log.final_val);
    if (warm_loss < cold_loss) ++wins;
    if (-untaxed_log.final_val < cold_loss) ++untaxed_wins;
  }
  double elapsed = seconds_since(start);
  bool pass = wins >= 16 && elapsed < 300.0;
  return {pass,
          fmt("cond-100 d=32 quadratic, 10k queries: full method wins %d/20 "
              "paired seeds (need >= 16), median loss %.2g vs %.2g cold; "
              "probe-free search-only warm start wins %d/20 (median %.2g) "
              "— on this noise-free quadratic the matched-probe descent is "
              "bias-free, so the 2d-per-generation sharpness surcharge is "
              "what decides the pairing; %.0fs (limit 300s)",
              wins, median(warm_losses), median(cold_losses), untaxed_wins,
              median(untaxed_losses), elapsed)};
}

// ---------------------------------------------------------------------------
// 5. The sharpness weight steers the search toward the flat basin.
//
// Every run starts inside the sharp global minimum. A plain search (rho = 0)
// with a cloud narrower than the well converges there and stays; with
// rho = 0.1 the sampling cloud is displaced by the worst-case offset every
// generation, which keeps the search from settling in a well of comparable
// width, and it migrates to the flat basin.

Outcome criterion_sharpness_effect() {
  auto start = Clock::now();
  TwoBasinSpec bspec;
  bspec.d = 8;
  bspec.curvature_ratio = 200.0;
  bspec.depth_gap = 0.1;
  bspec.seed = 2;
  bspec.start_in_sharp = true;

  auto run_variant = [&](double rho, std::uint64_t seed) {
    RunConfig cfg;
    cfg.d = 8;
    cfg.total_steps = 50;
    cfg.population = 16;
    cfg.rho = rho;
    cfg.sigma0 = 0.05;
    cfg.stage1_cap = 40;
    cfg.patience = 45;
    cfg.stage2_pruning = PruningMode::kNone;
    cfg.seed = seed;
    auto obj = make_two_basin(bspec);
    RunLog log = run(cfg, *obj);
    return obj->which_basin(log.final_w);  // 1 = flat
  };

  int flat_sharp_aware = 0, flat_plain = 0;
  int help = 0, harm = 0;  // discordant pairs
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    int a = run_variant(0.1, seed);
    int b = run_variant(0.0, seed);
    flat_sharp_aware += a;
    flat_plain += b;
    if (a == 1 && b == 0) ++help;
    if (a == 0 && b == 1) ++harm;
  }
  double p = binomial_tail(help, help + harm);
  double elapsed = seconds_since(start);
  bool pass =
      flat_sharp_aware > flat_plain && p < 0.05 && elapsed < 300.0;
  return {pass,
          fmt("two-basin (start in the sharp global minimum), 50 paired "
              "seeds: flat endings %d/50 (rho=0.1) vs %d/50 (rho=0); "
              "discordant %d vs %d, exact binomial p = %.2e (need < 0.05); "
              "%.0fs (limit 300s)",
              flat_sharp_aware, flat_plain, help, harm, p, elapsed)};
}

// ---------------------------------------------------------------------------
// 6. Descent stage shows a linear rate on a gradient-dominated objective.

Outcome criterion_linear_rate() {
  QuadraticSpec sphere;
  sphere.d = 8;
  sphere.condition_number = 1.0;
  sphere.seed = 5;

  std::vector<double> rates, r2s;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RunConfig cfg;
    cfg.d = 8;
    cfg.total_steps = 1500;
    cfg.population = 8;
    cfg.stage1_cap = 5;
    cfg.stage2_pruning = PruningMode::kNone;
    cfg.seed = seed;
    auto obj = make_quadratic(sphere);
    RunLog log = run(cfg, *obj);
    RateFit fit = fit_linear_rate(log, 0.0, log.transition_step + 200,
                                  log.rows.back().step + 1);
    rates.push_back(fit.rate);
    r2s.push_back(fit.r2);
  }
  double rate_med = median(rates);
  double r2_med = median(r2s);
  auto obj = make_quadratic(sphere);
  double predicted = 1e-3 * obj->pl_constant();  // eta * PL constant
  double ratio = std::abs(rate_med) / predicted;
  bool pass = r2_med >= 0.95 && rate_med < 0.0 && ratio >= 1.0 / 3.0 &&
              ratio <= 3.0;
  return {pass,
          fmt("noise-free sphere, 10-seed median: rate %.3e/step (r2 %.3f, "
              "need >= 0.95), |rate| = %.2f x eta*pl (need within 3x)",
              rate_med, r2_med, ratio)};
}

// ---------------------------------------------------------------------------
// 7. Curvature-scored pruning vs magnitude pruning on the prompt task.

Outcome criterion_pruning_ablation() {
  auto start = Clock::now();
  // Eight classes with half the prompt blocks sign-flipped leave real
  // headroom, and the 3000-query budget ends every run mid-climb, so the
  // final accuracy reflects how well the active set was chosen rather than
  // saturating at 1.0. The early stage-1 handoff spends most of the budget
  // under the mask, and the refresh cadence keeps the curvature-score
  // overhead (2dB queries per refresh) a small fraction of stage 2.
  PromptTaskSpec pspec;
  pspec.classes = 8;
  pspec.samples = 240;
  pspec.sample_noise = 0.5;
  pspec.seed = 1;

  auto run_variant = [&](PruningMode mode, double sparsity,
                         std::uint64_t seed) {
    RunConfig cfg;
    cfg.d = 32;
    cfg.seed = seed;
    cfg.query_budget = 3000;
    cfg.total_steps = 1501;
    cfg.stage1_cap = 12;
    cfg.mask_period = 400;
    cfg.fisher_batches = 2;
    cfg.eta = 0.02;
    cfg.stage2_pruning = mode;
    cfg.sparsity = sparsity;
    auto obj = make_prompt_task(pspec);
    RunLog log = run(cfg, *obj);
    return log.final_val;  // accuracy
  };

  std::printf("      sparsity sweep, median final accuracy over seeds:\n");
  std::printf("      %8s %12s %12s\n", "sparsity", "curvature", "magnitude");
  double z_at_half = 0.0, m_at_half = 0.0;
  for (int pct = 10; pct <= 90; pct += 10) {
    double sparsity = pct / 100.0;
    int seeds = pct == 50 ? 20 : 10;  // headline comparison gets 20 seeds
    std::vector<double> z_acc, m_acc;
    for (std::uint64_t seed = 0; seed < static_cast<std::uint64_t>(seeds);
         ++seed) {
      z_acc.push_back(run_variant(PruningMode::kZscore, sparsity, seed));
      m_acc.push_back(run_variant(PruningMode::kMagnitude, sparsity, seed));
    }
    double z_med = median(z_acc), m_med = median(m_acc);
    if (pct == 50) {
      z_at_half = z_med;
      m_at_half = m_med;
    }
    std::printf("      %7d%% %12.4f %12.4f%s\n", pct, z_med, m_med,
                pct == 50 ? "  (20 seeds)" : "");
  }
  double elapsed = seconds_since(start);
  bool pass = z_at_half >= m_at_half;
  return {pass,
          fmt("prompt task, sparsity 0.5, 20 seeds: curvature-scored median "
              "accuracy %.4f >= magnitude %.4f (ties acceptable); sweep "
              "above; %.0fs",
              z_at_half, m_at_half, elapsed)};
}

// ---------------------------------------------------------------------------
// 8. Query totals match the closed form; reruns are byte-identical.

Outcome criterion_query_accounting() {
  struct Case {
    const char* name;
    QuadraticSpec objective;
    RunConfig config;
  };
  std::vector<Case> cases;
  {
    Case c;
    c.name = "deterministic+curvature";
    c.objective.d = 6;
    c.objective.condition_number = 10.0;
    c.objective.seed = 1;
    c.config.d = 6;
    c.config.total_steps = 14;
    c.config.population = 8;
    c.config.stage1_cap = 4;
    c.config.mask_period = 3;
    c.config.q = 2;
    c.config.seed = 5;
    cases.push_back(c);
  }
  {
    Case c;
    c.name = "noisy+budget-stop";
    c.objective.d = 5;
    c.objective.noise_std = 0.5;
    c.objective.seed = 2;
    c.config.d = 5;
    c.config.total_steps = 400;
    c.config.population = 6;
    c.config.stage1_cap = 10;
    c.config.mask_period = 4;
    c.config.query_budget = 300;
    c.config.seed = 2;
    cases.push_back(c);
  }
  {
    Case c;
    c.name = "magnitude";
    c.objective.d = 7;
    c.objective.seed = 3;
    c.config.d = 7;
    c.config.total_steps = 20;
    c.config.population = 6;
    c.config.stage1_cap = 3;
    c.config.mask_period = 5;
    c.config.q = 3;
    c.config.stage2_pruning = PruningMode::kMagnitude;
    c.config.seed = 9;
    cases.push_back(c);
  }
  {
    Case c;
    c.name = "plain+dense";
    c.objective.d = 4;
    c.objective.seed = 6;
    c.config.d = 4;
    c.config.total_steps = 25;
    c.config.population = 5;
    c.config.stage1_cap = 6;
    c.config.stage1_mode = Stage1Mode::kNaive;
    c.config.stage2_pruning = PruningMode::kNone;
    c.config.seed = 4;
    cases.push_back(c);
  }

  for (const Case& c : cases) {
    auto obj = make_quadratic(c.objective);
    RunLog log = run(c.config, *obj);

    const RunConfig& used = log.config;  // fisher_batches resolved here
    long long n1 = 0, n2 = 0;
    for (const StepRow& row : log.rows) (row.stage == 1 ? n1 : n2) += 1;

    long long gen_cost =
        used.population +
        (used.stage1_mode == Stage1Mode::kSharp ? 2LL * used.d : 0);
    long long stage1_expected = n1 * gen_cost;

    long long refreshes_expected = 0;
    if (used.stage2_pruning != PruningMode::kNone && n2 > 0) {
      refreshes_expected = 1 + (n2 - 1) / used.mask_period;
    }
    long long refresh_queries =
        used.stage2_pruning == PruningMode::kZscore
            ? refreshes_expected * 2LL * used.d * used.fisher_batches
            : 0;
    long long stage2_expected = n2 * 2LL * used.q + refresh_queries;

    bool totals_ok =
        log.stage1_queries == stage1_expected &&
        log.stage2_queries == stage2_expected &&
        log.total_queries == stage1_expected + stage2_expected &&
        log.mask_refreshes == refreshes_expected &&
        (log.rows.empty() || log.rows.back().queries == log.total_queries) &&
        (used.query_budget == 0 || log.total_queries <= used.query_budget);
    if (!totals_ok) {
      return {false,
              fmt("%s: recorded totals (s1 %lld, s2 %lld, refreshes %lld) "
                  "disagree with closed form (s1 %lld, s2 %lld, refreshes "
                  "%lld)",
                  c.name, log.stage1_queries, log.stage2_queries,
                  log.mask_refreshes, stage1_expected, stage2_expected,
                  refreshes_expected)};
    }

    auto rerun_obj = make_quadratic(c.objective);
    RunLog rerun = sharpzo::run(c.config, *rerun_obj);
    if (log.to_csv() != rerun.to_csv()) {
      return {false, fmt("%s: rerun is not byte-identical", c.name)};
    }
  }
  return {true,
          "4 configurations (sharp/plain, curvature/magnitude/dense, noisy "
          "budget-stop): query totals match the closed form exactly and "
          "reruns serialize byte-identically"};
}

// ---------------------------------------------------------------------------
// 9. Transition rule boundary behavior.

Outcome criterion_transition_boundary() {
  const double tol = 0.01;
  const int patience = 10;

  // Ten consecutive entries whose gain over the incumbent best stays within
  // the tolerance (0.0078125 is exactly representable, so the delta really
  // is <= 0.01): the rule fires on the 10th such step and not before.
  const double plateau = 1.0078125;
  std::vector<double> h = {1.0};
  for (int i = 0; i < 9; ++i) h.push_back(plateau);
  if (transition_check(h, tol, patience)) {
    return {false, "fired after only 9 non-improving steps"};
  }
  h.push_back(plateau);
  if (!transition_check(h, tol, patience)) {
    return {false, "did not fire on the 10th non-improving step"};
  }

  // A hair more than the tolerance is an improvement and must block.
  std::vector<double> improving = {1.0};
  for (int i = 0; i < 10; ++i) improving.push_back(1.0 + 0.0100001);
  if (transition_check(improving, tol, patience)) {
    return {false, "fired although the metric improved by more than 0.01"};
  }

  // Exactly representable tolerance: the boundary is <=, not <.
  std::vector<double> exact = {1.0};
  for (int i = 0; i < 10; ++i) exact.push_back(1.0078125);
  if (!transition_check(exact, 0.0078125, patience)) {
    return {false, "delta == tol was not treated as non-improving"};
  }
  if (transition_check(exact, 0.00390625, patience)) {
    return {false, "delta > tol was treated as non-improving"};
  }

  // A late improvement inside the window resets the count.
  std::vector<double> rescued = {1.0};
  for (int i = 0; i < 9; ++i) rescued.push_back(plateau);
  rescued.push_back(1.5);
  if (transition_check(rescued, tol, patience)) {
    return {false, "fired despite an improvement inside the window"};
  }

  return {true,
          "fires on exactly the 10th non-improving step, treats delta == "
          "0.01 as plateau and delta > 0.01 as improvement, and resets on "
          "late gains"};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    const char* name;
    std::function<Outcome()> body;
  };
  const std::vector<Criterion> criteria = {
      {"coordinate estimator exactness", criterion_estimator_exactness},
      {"random estimator statistics", criterion_rge_statistics},
      {"baseline reduction at rho=0", criterion_baseline_reduction},
      {"warm start beats cold descent", criterion_warm_start},
      {"sharpness weight prefers the flat basin", criterion_sharpness_effect},
      {"linear descent rate", criterion_linear_rate},
      {"curvature pruning vs magnitude pruning", criterion_pruning_ablation},
      {"query accounting and determinism", criterion_query_accounting},
      {"transition rule boundary", criterion_transition_boundary},
  };

  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    int number = static_cast<int>(i) + 1;
    if (only != 0 && number != only) continue;
    Outcome outcome;
    try {
      outcome = criteria[i].body();
    } catch (const std::exception& ex) {
      outcome = {false, std::string("exception: ") + ex.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("%s  %d  %s — %s\n", outcome.pass ? "PASS" : "FAIL", number,
                criteria[i].name, outcome.detail.c_str());
    std::fflush(stdout);
  }
  if (only == 0) {
    std::printf("acceptance: %d/9 criteria passed\n", 9 - failures);
  }
  return failures == 0 ? 0 : 1;
}
