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

#include "sharpzo/driver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sharpzo/cmaes.hpp"

namespace sharpzo {
namespace {

void check(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument("run config: " + message);
}

void validate(const RunConfig& c, const ObjectiveFunction& obj) {
  check(c.d >= 1, "d must be >= 1");
  check(obj.dim() == c.d, "objective dimension does not match d");
  check(c.total_steps >= 1, "total_steps must be >= 1");
  check(c.population >= 2, "population must be >= 2");
  check(c.rho >= 0.0 && std::isfinite(c.rho), "rho must be >= 0");
  check(c.sigma0 > 0.0 && std::isfinite(c.sigma0), "sigma0 must be > 0");
  check(c.mu_cge > 0.0, "mu_cge must be > 0");
  check(c.mu_rge > 0.0, "mu_rge must be > 0");
  check(c.q >= 1, "q must be >= 1");
  check(c.eta > 0.0 && std::isfinite(c.eta), "eta must be > 0");
  check(c.mask_period >= 1, "mask_period must be >= 1");
  check(c.sparsity >= 0.0 && c.sparsity <= 1.0, "sparsity must be in [0, 1]");
  check(c.fisher_batches >= 0, "fisher_batches must be >= 0");
  check(c.patience >= 1, "patience must be >= 1");
  check(c.improve_tol >= 0.0, "improve_tol must be >= 0");
  check(c.stage1_cap >= 1, "stage1_cap must be >= 1");
  check(c.query_budget >= 0, "query_budget must be >= 0");
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

bool transition_check(const std::vector<double>& history, double improve_tol,
                      int patience) {
  if (patience < 1) {
    throw std::invalid_argument("transition_check: patience must be >= 1");
  }
  if (improve_tol < 0.0 || !std::isfinite(improve_tol)) {
    throw std::invalid_argument("transition_check: improve_tol must be >= 0");
  }
  const int n = static_cast<int>(history.size());
  if (n < patience + 1) return false;

  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n - patience; ++i) {
    best = std::max(best, history[static_cast<std::size_t>(i)]);
  }
  for (int i = n - patience; i < n; ++i) {
    if (history[static_cast<std::size_t>(i)] - best > improve_tol) return false;
  }
  return true;
}

RateFit fit_linear_rate(const std::vector<double>& losses, double l_star,
                        int begin, int end) {
  const int n = static_cast<int>(losses.size());
  if (begin < 0 || end > n || end - begin < 2) {
    throw std::invalid_argument("fit_linear_rate: window [" +
                                std::to_string(begin) + ", " +
                                std::to_string(end) + ") is malformed");
  }
  const int m = end - begin;
  std::vector<double> ys(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double gap = losses[static_cast<std::size_t>(begin + i)] - l_star;
    if (!(gap > 0.0) || !std::isfinite(gap)) {
      throw std::invalid_argument(
          "fit_linear_rate: non-positive loss gap at index " +
          std::to_string(begin + i));
    }
    ys[static_cast<std::size_t>(i)] = std::log(gap);
  }

  double x_mean = begin + (m - 1) / 2.0;
  double y_mean = 0.0;
  for (double y : ys) y_mean += y;
  y_mean /= m;

  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < m; ++i) {
    double dx = (begin + i) - x_mean;
    sxy += dx * (ys[static_cast<std::size_t>(i)] - y_mean);
    sxx += dx * dx;
  }
  double slope = sxy / sxx;
  double intercept = y_mean - slope * x_mean;

  double ss_res = 0.0, ss_tot = 0.0;
  for (int i = 0; i < m; ++i) {
    double y = ys[static_cast<std::size_t>(i)];
    double fit = intercept + slope * (begin + i);
    ss_res += (y - fit) * (y - fit);
    ss_tot += (y - y_mean) * (y - y_mean);
  }

  RateFit out;
  out.rate = slope;
  out.points = m;
  if (ss_tot == 0.0) {
    out.r2 = ss_res == 0.0 ? 1.0 : 0.0;
  } else {
    out.r2 = 1.0 - ss_res / ss_tot;
  }
  return out;
}

RateFit fit_linear_rate(const RunLog& log, double l_star, int begin_step,
                        int end_step) {
  std::vector<double> losses;
  int first_step = -1;
  for (const StepRow& row : log.rows) {
    if (row.step < begin_step || row.step >= end_step) continue;
    if (first_step < 0) first_step = row.step;
    losses.push_back(-row.val_metric);
  }
  if (losses.size() < 2) {
    throw std::invalid_argument(
        "fit_linear_rate: window selects fewer than 2 log rows");
  }
  return fit_linear_rate(losses, l_star, 0, static_cast<int>(losses.size()));
}

std::string RunLog::to_csv(bool include_timings) const {
  std::string out = "step,stage,queries,train_loss,val_metric,sigma,active_coords,wall_ms\n";
  char head[96];
  for (const StepRow& row : rows) {
    std::snprintf(head, sizeof(head), "%d,%d,%lld,", row.step, row.stage,
                  static_cast<long long>(row.queries));
    out += head;
    append_double(out, row.train_loss);
    out += ',';
    append_double(out, row.val_metric);
    out += ',';
    append_double(out, row.sigma);
    out += ',';
    out += std::to_string(row.active_coords);
    out += ',';
    if (include_timings) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.3f", row.wall_ms);
      out += buf;
    } else {
      out += '0';
    }
    out += '\n';
  }
  return out;
}

RunLog run(const RunConfig& config, const ObjectiveFunction& obj) {
  validate(config, obj);

  RunLog log;
  log.config = config;
  if (log.config.fisher_batches == 0) {
    log.config.fisher_batches = obj.stochastic() ? 4 : 1;
  }
  const RunConfig& cfg = log.config;
  const std::int64_t budget = cfg.query_budget == 0
                                  ? std::numeric_limits<std::int64_t>::max()
                                  : cfg.query_budget;

  obj.queries().reset();
  RngStream root(cfg.seed, 0);
  RngStream init_stream = root.substream(streams::kInit);
  Vector w0 = obj.initial_point(init_stream);

  // ---- Stage 1: distribution search ---------------------------------------
  obj.queries().set_stage(Stage::kStage1);
  CmaState cma(w0, cfg.sigma0, cfg.population);
  RngStream stage1_root = root.substream(streams::kStage1);

  SharpStepOptions step_options;
  step_options.rho = cfg.rho;
  step_options.mu_cge = cfg.mu_cge;
  step_options.sharpness = cfg.stage1_mode == Stage1Mode::kSharp;
  const std::int64_t stage1_cost =
      cfg.population + (step_options.sharpness ? 2LL * cfg.d : 0);

  std::vector<double> val_history;
  double best_fitness = std::numeric_limits<double>::infinity();
  Vector best_w = w0;
  int t = 0;
  bool fired = false;
  while (t < cfg.total_steps) {
    if (stage1_cost > budget - obj.queries().total()) break;
    auto start = std::chrono::steady_clock::now();

    RngStream gen_stream =
        stage1_root.substream(static_cast<std::uint64_t>(t + 1));
    GenerationRecord rec = sharpness_step(cma, obj, step_options, gen_stream);
    ++t;

    if (rec.any_finite && rec.best_fitness < best_fitness) {
      best_fitness = rec.best_fitness;
      best_w = rec.best_w;
    }
    double val = obj.validation_metric(cma.theta);
    val_history.push_back(val);

    StepRow row;
    row.step = t;
    row.stage = 1;
    row.queries = obj.queries().total();
    row.train_loss = rec.best_fitness;
    row.val_metric = val;
    row.sigma = rec.sigma_after;
    row.active_coords = cfg.d;
    row.wall_ms = elapsed_ms(start);
    log.rows.push_back(row);

    if (transition_check(val_history, cfg.improve_tol, cfg.patience) ||
        t >= cfg.stage1_cap) {
      fired = true;
      break;
    }
  }
  log.transition_step = t;  // the step the rule (or cap/budget) fired at
  (void)fired;
  log.stage1_queries = obj.queries().by_stage(Stage::kStage1);

  // ---- Stage 2: sparse descent from the learned mean ----------------------
  obj.queries().set_stage(Stage::kStage2);
  ZoState zo;
  zo.w = cfg.stage2_init == Stage2Init::kMean ? cma.theta : best_w;
  zo.t = log.transition_step;

  ZoStepOptions zo_options;
  zo_options.eta = cfg.eta;
  zo_options.mu = cfg.mu_rge;
  zo_options.q = cfg.q;
  zo_options.literal_probe_direction = cfg.literal_probe_direction;

  MaskRefreshOptions mask_options;
  mask_options.mode = cfg.stage2_pruning;
  mask_options.sparsity = cfg.sparsity;
  mask_options.mu = cfg.mu_cge;
  mask_options.batches = cfg.fisher_batches;
  mask_options.transition_step = log.transition_step;
  mask_options.period = cfg.mask_period;
  mask_options.literal_scores = cfg.literal_fisher_scores;

  RngStream stage2_root = root.substream(streams::kStage2);
  while (t < cfg.total_steps) {
    int since = zo.t - mask_options.transition_step;
    bool refresh_due =
        zo.mask.empty() || since == 0 ||
        (since > 0 && since % mask_options.period == 0);
    std::int64_t cost = 2LL * cfg.q;
    if (refresh_due && cfg.stage2_pruning == PruningMode::kZscore) {
      cost += 2LL * cfg.d * cfg.fisher_batches;
    }
    if (cost > budget - obj.queries().total()) break;

    auto start = std::chrono::steady_clock::now();
    RngStream step_stream =
        stage2_root.substream(static_cast<std::uint64_t>(t + 1));
    MaskRefreshRecord refresh =
        maybe_refresh_mask(zo, obj, mask_options, step_stream);
    if (refresh.refreshed) ++log.mask_refreshes;

    ZoStepRecord rec = zo_step(zo, obj, zo_options, step_stream);
    t = zo.t;

    StepRow row;
    row.step = t;
    row.stage = 2;
    row.queries = obj.queries().total();
    row.train_loss = rec.mean_probe_loss;
    row.val_metric = obj.validation_metric(zo.w);
    row.sigma = 0.0;
    row.active_coords =
        zo.mask.empty() ? cfg.d : zo.mask.active_count();
    row.wall_ms = elapsed_ms(start);
    log.rows.push_back(row);
  }

  log.stage2_queries = obj.queries().by_stage(Stage::kStage2);
  log.total_queries = obj.queries().total();
  log.final_w = log.transition_step == t ? cma.theta : zo.w;
  log.final_val = obj.validation_metric(log.final_w);
  obj.queries().set_stage(Stage::kOther);
  return log;
}

}  // namespace sharpzo
