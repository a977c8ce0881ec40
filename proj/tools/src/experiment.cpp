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

#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <thread>

#include "runlog_io.hpp"
#include "svg.hpp"

namespace sharpzo::cli {
namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

void check_cfg(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument("run config: " + message);
}

// Type-7 quantile (linear interpolation between order statistics).
double quantile(std::vector<double> v, double p) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  double idx = p * (static_cast<double>(v.size()) - 1.0);
  std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = idx - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

std::string fmt(double v, const char* f = "%.10g") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["d"] = c.d;
  j["total_steps"] = c.total_steps;
  j["population"] = c.population;
  j["rho"] = c.rho;
  j["sigma0"] = c.sigma0;
  j["mu_cge"] = c.mu_cge;
  j["mu_rge"] = c.mu_rge;
  j["q"] = c.q;
  j["eta"] = c.eta;
  j["mask_period"] = c.mask_period;
  j["sparsity"] = c.sparsity;
  j["fisher_batches"] = c.fisher_batches;
  j["patience"] = c.patience;
  j["improve_tol"] = c.improve_tol;
  j["seed"] = c.seed;
  j["stage2_pruning"] = c.stage2_pruning == PruningMode::kZscore
                            ? "zscore"
                            : c.stage2_pruning == PruningMode::kMagnitude
                                  ? "magnitude"
                                  : "none";
  j["stage1_mode"] = c.stage1_mode == Stage1Mode::kSharp ? "sharp" : "naive";
  j["stage2_init"] =
      c.stage2_init == Stage2Init::kMean ? "mean" : "best";
  j["stage1_cap"] = c.stage1_cap;
  j["query_budget"] = c.query_budget;
  j["literal_probe_direction"] = c.literal_probe_direction;
  j["literal_fisher_scores"] = c.literal_fisher_scores;
  return j;
}

nlohmann::ordered_json meta_json(const ExperimentSpec& spec,
                                 const MethodPlan& plan, const RunLog& log,
                                 const ObjectiveFunction& obj,
                                 std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["method"] = plan.name;
  j["seed"] = seed;
  j["objective"] = objective_json(spec.objective);
  j["mode"]["cold_start"] = plan.cold;
  j["mode"]["search_only"] = plan.pure_search;
  j["config"] = config_json(log.config);
  auto hint = obj.optimum_hint();
  if (hint) {
    j["l_star"] = *hint;
  } else {
    j["l_star"] = nullptr;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Summary, rebuilt entirely from the CSV files on disk.

struct SeedSummary {
  std::uint64_t seed = 0;
  std::vector<LogRow> rows;
  std::optional<double> final_loss;  // -val_metric of the last row
  std::optional<double> final_val;
  std::optional<long long> queries_to_threshold;
  std::optional<double> rate;
  std::optional<double> rate_r2;
  long long total_queries = 0;
};

struct MethodSummary {
  std::string name;
  std::vector<SeedSummary> seeds;

  std::vector<double> collect(
      std::optional<double> SeedSummary::*field) const {
    std::vector<double> out;
    for (const SeedSummary& s : seeds) {
      if (s.*field) out.push_back(*(s.*field));
    }
    return out;
  }
};

SeedSummary summarize_seed(const std::string& csv_path, std::uint64_t seed,
                           std::optional<double> l_star,
                           std::optional<double> threshold) {
  SeedSummary s;
  s.seed = seed;
  s.rows = read_run_csv(csv_path);
  if (s.rows.empty()) return s;

  s.final_loss = -s.rows.back().val_metric;
  s.final_val = s.rows.back().val_metric;
  s.total_queries = s.rows.back().queries;

  if (threshold) {
    for (const LogRow& row : s.rows) {
      if (-row.val_metric <= *threshold) {
        s.queries_to_threshold = row.queries;
        break;
      }
    }
  }

  if (l_star) {
    std::vector<double> losses;
    for (const LogRow& row : s.rows) {
      if (row.stage == 2) losses.push_back(-row.val_metric);
    }
    int n = static_cast<int>(losses.size());
    if (n >= 4) {
      try {
        RateFit fit = fit_linear_rate(losses, *l_star, n / 2, n);
        s.rate = fit.rate;
        s.rate_r2 = fit.r2;
      } catch (const std::invalid_argument&) {
        // Gap hit zero or went negative inside the window: no rate.
      }
    }
  }
  return s;
}

std::string summary_csv(const std::vector<MethodSummary>& methods) {
  std::string out =
      "method,seeds,final_loss_median,final_loss_iqr,"
      "queries_to_threshold_median,rate_median,rate_r2_median,"
      "final_val_median\n";
  for (const MethodSummary& m : methods) {
    auto final_loss = m.collect(&SeedSummary::final_loss);
    auto final_val = m.collect(&SeedSummary::final_val);
    auto rate = m.collect(&SeedSummary::rate);
    auto r2 = m.collect(&SeedSummary::rate_r2);

    // Seeds that never reach the threshold enter the median as +inf; an
    // infinite median prints as the empty-cell sentinel.
    std::vector<double> q2t;
    for (const SeedSummary& s : m.seeds) {
      q2t.push_back(s.queries_to_threshold
                        ? static_cast<double>(*s.queries_to_threshold)
                        : std::numeric_limits<double>::infinity());
    }
    double q2t_median = quantile(q2t, 0.5);

    out += m.name + "," + std::to_string(m.seeds.size()) + ",";
    out += final_loss.empty() ? "" : fmt(quantile(final_loss, 0.5));
    out += ",";
    out += final_loss.empty()
               ? ""
               : fmt(quantile(final_loss, 0.75) - quantile(final_loss, 0.25));
    out += ",";
    out += std::isfinite(q2t_median) ? fmt(q2t_median) : "";
    out += ",";
    out += rate.empty() ? "" : fmt(quantile(rate, 0.5));
    out += ",";
    out += r2.empty() ? "" : fmt(quantile(r2, 0.5));
    out += ",";
    out += final_val.empty() ? "" : fmt(quantile(final_val, 0.5));
    out += "\n";
  }
  return out;
}

nlohmann::ordered_json summary_json(const ExperimentSpec& spec,
                                    int total_steps,
                                    const std::vector<MethodSummary>& methods) {
  nlohmann::ordered_json j;
  j["objective"] = objective_json(spec.objective);
  j["budget"] = spec.budget;
  j["total_steps"] = total_steps;
  if (spec.threshold) {
    j["threshold"] = *spec.threshold;
  } else {
    j["threshold"] = nullptr;
  }
  j["seeds"] = spec.seeds;

  auto stat_block = [](const std::vector<double>& values) {
    nlohmann::ordered_json b;
    if (values.empty()) {
      b["median"] = nullptr;
    } else {
      b["median"] = quantile(values, 0.5);
      b["q25"] = quantile(values, 0.25);
      b["q75"] = quantile(values, 0.75);
      b["iqr"] = quantile(values, 0.75) - quantile(values, 0.25);
    }
    return b;
  };

  j["methods"] = nlohmann::ordered_json::array();
  for (const MethodSummary& m : methods) {
    nlohmann::ordered_json e;
    e["name"] = m.name;

    auto per_seed = [&](auto getter) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const SeedSummary& s : m.seeds) {
        auto v = getter(s);
        if (v) {
          arr.push_back(*v);
        } else {
          arr.push_back(nullptr);
        }
      }
      return arr;
    };

    e["final_loss"] = stat_block(m.collect(&SeedSummary::final_loss));
    e["final_loss"]["per_seed"] =
        per_seed([](const SeedSummary& s) { return s.final_loss; });
    e["final_val_metric"] = stat_block(m.collect(&SeedSummary::final_val));
    e["final_val_metric"]["per_seed"] =
        per_seed([](const SeedSummary& s) { return s.final_val; });

    std::vector<double> q2t_known;
    bool all_known = true;
    for (const SeedSummary& s : m.seeds) {
      if (s.queries_to_threshold) {
        q2t_known.push_back(static_cast<double>(*s.queries_to_threshold));
      } else {
        all_known = false;
      }
    }
    nlohmann::ordered_json q2t;
    std::vector<double> q2t_all;
    for (const SeedSummary& s : m.seeds) {
      q2t_all.push_back(s.queries_to_threshold
                            ? static_cast<double>(*s.queries_to_threshold)
                            : std::numeric_limits<double>::infinity());
    }
    double med = quantile(q2t_all, 0.5);
    if (std::isfinite(med)) {
      q2t["median"] = med;
    } else {
      q2t["median"] = nullptr;
    }
    q2t["reached_all_seeds"] = all_known && !m.seeds.empty();
    q2t["per_seed"] = per_seed(
        [](const SeedSummary& s) { return s.queries_to_threshold; });
    e["queries_to_threshold"] = std::move(q2t);

    nlohmann::ordered_json rate;
    auto rates = m.collect(&SeedSummary::rate);
    auto r2s = m.collect(&SeedSummary::rate_r2);
    if (rates.empty()) {
      rate["median"] = nullptr;
      rate["r2_median"] = nullptr;
    } else {
      rate["median"] = quantile(rates, 0.5);
      rate["r2_median"] = quantile(r2s, 0.5);
    }
    rate["per_seed"] = per_seed([](const SeedSummary& s) { return s.rate; });
    e["rate"] = std::move(rate);

    nlohmann::ordered_json tq = nlohmann::ordered_json::array();
    for (const SeedSummary& s : m.seeds) tq.push_back(s.total_queries);
    e["total_queries"] = std::move(tq);

    j["methods"].push_back(std::move(e));
  }
  return j;
}

// Step-function resampling of every seed's loss curve onto a shared grid,
// reduced to median and interquartile band per grid point.
std::optional<ChartSeries> chart_series(const MethodSummary& m) {
  double q_lo = std::numeric_limits<double>::infinity();
  double q_hi = -q_lo;
  std::size_t with_rows = 0;
  for (const SeedSummary& s : m.seeds) {
    if (s.rows.empty()) continue;
    ++with_rows;
    q_lo = std::min(q_lo, static_cast<double>(s.rows.front().queries));
    q_hi = std::max(q_hi, static_cast<double>(s.rows.back().queries));
  }
  if (with_rows == 0) return std::nullopt;
  if (q_hi <= q_lo) q_hi = q_lo + 1;

  constexpr int kPoints = 160;
  ChartSeries series;
  series.label = m.name;
  for (int i = 0; i < kPoints; ++i) {
    double q = q_lo + (q_hi - q_lo) * i / (kPoints - 1);
    std::vector<double> values;
    for (const SeedSummary& s : m.seeds) {
      if (s.rows.empty()) continue;
      double v = -s.rows.front().val_metric;  // clamp left of the first row
      for (const LogRow& row : s.rows) {
        if (static_cast<double>(row.queries) > q) break;
        v = -row.val_metric;
      }
      values.push_back(v);
    }
    series.x.push_back(q);
    series.median.push_back(quantile(values, 0.5));
    series.lo.push_back(quantile(values, 0.25));
    series.hi.push_back(quantile(values, 0.75));
  }
  return series;
}

void print_table(std::ostream& out, const ExperimentSpec& spec,
                 const std::vector<MethodSummary>& methods,
                 const std::string& dir) {
  char line[256];
  out << "objective: " << spec.objective.name()
      << " (d=" << spec.objective.dim() << ")";
  if (spec.budget > 0) out << ", budget " << spec.budget << " queries";
  out << ", " << spec.seeds.size() << " seed(s)\n";
  std::snprintf(line, sizeof(line), "%-24s %14s %12s %14s %12s %12s\n",
                "method", "loss median", "loss IQR", "queries->thr",
                "rate", "final val");
  out << line;
  for (const MethodSummary& m : methods) {
    auto final_loss = m.collect(&SeedSummary::final_loss);
    auto final_val = m.collect(&SeedSummary::final_val);
    auto rates = m.collect(&SeedSummary::rate);
    std::vector<double> q2t;
    for (const SeedSummary& s : m.seeds) {
      q2t.push_back(s.queries_to_threshold
                        ? static_cast<double>(*s.queries_to_threshold)
                        : std::numeric_limits<double>::infinity());
    }
    double q2t_median = quantile(q2t, 0.5);
    std::string loss_m = final_loss.empty() ? "-" : fmt(quantile(final_loss, 0.5), "%.4g");
    std::string loss_iqr =
        final_loss.empty()
            ? "-"
            : fmt(quantile(final_loss, 0.75) - quantile(final_loss, 0.25),
                  "%.4g");
    std::string thr = std::isfinite(q2t_median) ? fmt(q2t_median, "%.10g") : "-";
    std::string rate = rates.empty() ? "-" : fmt(quantile(rates, 0.5), "%.4g");
    std::string val = final_val.empty() ? "-" : fmt(quantile(final_val, 0.5), "%.4g");
    std::snprintf(line, sizeof(line), "%-24s %14s %12s %14s %12s %12s\n",
                  m.name.c_str(), loss_m.c_str(), loss_iqr.c_str(),
                  thr.c_str(), rate.c_str(), val.c_str());
    out << line;
  }
  out << "wrote " << dir << "/summary.csv, summary.json, loss_vs_queries.svg\n";
}

}  // namespace

RunLog cold_zosgd_run(const RunConfig& config, const ObjectiveFunction& obj) {
  check_cfg(config.d >= 1, "d must be >= 1");
  check_cfg(obj.dim() == config.d, "objective dimension does not match d");
  check_cfg(config.total_steps >= 1, "total_steps must be >= 1");
  check_cfg(config.mu_rge > 0.0, "mu_rge must be > 0");
  check_cfg(config.q >= 1, "q must be >= 1");
  check_cfg(config.eta > 0.0 && std::isfinite(config.eta), "eta must be > 0");
  check_cfg(config.mask_period >= 1, "mask_period must be >= 1");
  check_cfg(config.sparsity >= 0.0 && config.sparsity <= 1.0,
            "sparsity must be in [0, 1]");
  check_cfg(config.fisher_batches >= 0, "fisher_batches must be >= 0");
  check_cfg(config.query_budget >= 0, "query_budget must be >= 0");

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

  ZoState zo;
  zo.w = obj.initial_point(init_stream);
  zo.t = 0;
  log.transition_step = 0;

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
  mask_options.transition_step = 0;
  mask_options.period = cfg.mask_period;
  mask_options.literal_scores = cfg.literal_fisher_scores;

  obj.queries().set_stage(Stage::kStage2);
  RngStream stage2_root = root.substream(streams::kStage2);
  int t = 0;
  while (t < cfg.total_steps) {
    int since = zo.t - mask_options.transition_step;
    bool refresh_due = zo.mask.empty() || since == 0 ||
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
    row.active_coords = zo.mask.empty() ? cfg.d : zo.mask.active_count();
    row.wall_ms = elapsed_ms(start);
    log.rows.push_back(row);
  }

  log.stage1_queries = 0;
  log.stage2_queries = obj.queries().by_stage(Stage::kStage2);
  log.total_queries = obj.queries().total();
  log.final_w = zo.w;
  log.final_val = obj.validation_metric(log.final_w);
  obj.queries().set_stage(Stage::kOther);
  return log;
}

RunConfig stamped_config(const ExperimentSpec& spec, const MethodPlan& plan,
                         std::uint64_t seed) {
  RunConfig cfg = plan.config;
  cfg.d = spec.objective.dim();
  cfg.seed = seed;
  cfg.query_budget = spec.budget;
  if (spec.total_steps > 0) {
    cfg.total_steps = spec.total_steps;
  } else {
    // Every step consumes at least two queries, so this many steps always
    // outlasts the query budget.
    cfg.total_steps = static_cast<int>(
        std::min<std::int64_t>(spec.budget / 2 + 1, 50000000));
  }
  if (plan.pure_search) {
    cfg.stage1_cap = cfg.total_steps;
    cfg.patience = cfg.total_steps + 1;  // the window can never fill
  }
  return cfg;
}

std::string resolve_out_dir(const ExperimentSpec& spec,
                            const RunExperimentOptions& options) {
  if (!options.out_override.empty()) return options.out_override;
  const char* env = std::getenv("SHARPZO_OUT_DIR");
  if (env != nullptr && env[0] != '\0') return env;
  if (!spec.out_dir.empty()) return spec.out_dir;
  return "runs";
}

int run_experiment(const ExperimentSpec& spec,
                   const RunExperimentOptions& options, std::ostream& out,
                   std::ostream& err) {
  const std::string dir = resolve_out_dir(spec, options);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    err << "error: cannot create output directory '" << dir
        << "': " << ec.message() << "\n";
    return 1;
  }

  struct Task {
    const MethodPlan* plan;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const MethodPlan& plan : spec.methods) {
    for (std::uint64_t seed : spec.seeds) tasks.push_back({&plan, seed});
  }

  struct Outcome {
    bool ok = false;
    std::string error;
  };
  std::vector<Outcome> outcomes(tasks.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      try {
        auto objective = make_objective(spec.objective);
        RunConfig cfg = stamped_config(spec, *task.plan, task.seed);
        RunLog log = task.plan->cold ? cold_zosgd_run(cfg, *objective)
                                     : run(cfg, *objective);
        std::string stem = dir + "/" + task.plan->name + "__seed" +
                           std::to_string(task.seed);
        atomic_write_file(stem + ".csv", log.to_csv(options.timings));
        atomic_write_file(
            stem + ".meta.json",
            meta_json(spec, *task.plan, log, *objective, task.seed).dump(2) +
                "\n");
        outcomes[i].ok = true;
      } catch (const std::exception& ex) {
        outcomes[i].error = ex.what();
      }
    }
  };

  int jobs = std::max(1, std::min<int>(options.jobs,
                                       static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int k = 0; k < jobs; ++k) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();

  bool failed = false;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (outcomes[i].ok) continue;
    failed = true;
    err << "error: method " << tasks[i].plan->name << ", seed "
        << tasks[i].seed << ": " << outcomes[i].error << "\n";
  }
  if (failed) {
    err << "runs failed; summary not written\n";
    return 1;
  }

  // Rebuild every reported number from the files just written.
  std::optional<double> l_star;
  {
    auto probe = make_objective(spec.objective);
    l_star = probe->optimum_hint();
  }
  std::vector<MethodSummary> methods;
  try {
    for (const MethodPlan& plan : spec.methods) {
      MethodSummary m;
      m.name = plan.name;
      for (std::uint64_t seed : spec.seeds) {
        std::string csv = dir + "/" + plan.name + "__seed" +
                          std::to_string(seed) + ".csv";
        m.seeds.push_back(summarize_seed(csv, seed, l_star, spec.threshold));
      }
      methods.push_back(std::move(m));
    }
  } catch (const std::exception& ex) {
    err << "error: summarizing logs: " << ex.what() << "\n";
    return 1;
  }

  int total_steps = stamped_config(spec, spec.methods.front(),
                                   spec.seeds.front())
                        .total_steps;
  atomic_write_file(dir + "/summary.csv", summary_csv(methods));
  atomic_write_file(dir + "/summary.json",
                    summary_json(spec, total_steps, methods).dump(2) + "\n");

  std::vector<ChartSeries> series;
  for (const MethodSummary& m : methods) {
    auto s = chart_series(m);
    if (s) series.push_back(std::move(*s));
  }
  std::string title = spec.objective.name() + " (d=" +
                      std::to_string(spec.objective.dim()) + ")";
  atomic_write_file(
      dir + "/loss_vs_queries.svg",
      render_chart(title, "cumulative queries",
                   "loss (negated validation metric)", series));

  print_table(out, spec, methods, dir);
  return 0;
}

}  // namespace sharpzo::cli
