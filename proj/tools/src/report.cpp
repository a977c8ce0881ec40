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

#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>

#include "runlog_io.hpp"

namespace sharpzo::cli {
namespace {

struct LoadedLog {
  std::string method;
  std::uint64_t seed = 0;
  std::vector<LogRow> rows;
};

struct MethodLogs {
  std::string name;
  std::map<std::uint64_t, const LoadedLog*> by_seed;
};

std::string fmt(double v, const char* f) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

double final_loss(const LoadedLog& log) { return -log.rows.back().val_metric; }

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::optional<long long> queries_to(const LoadedLog& log, double threshold) {
  for (const LogRow& row : log.rows) {
    if (-row.val_metric <= threshold) return row.queries;
  }
  return std::nullopt;
}

}  // namespace

int compare_report(const std::vector<std::string>& paths,
                   const ReportOptions& options, std::ostream& out,
                   std::ostream& err) {
  if (paths.empty()) {
    err << "error: no log files given\n";
    return 2;
  }

  std::vector<LoadedLog> logs;
  nlohmann::json objective;
  std::string objective_source;
  for (const std::string& path : paths) {
    LoadedLog log;
    nlohmann::json meta;
    try {
      log.rows = read_run_csv(path);
      meta = read_json_file(meta_path_for(path));
      log.method = meta.at("method").get<std::string>();
      log.seed = meta.at("seed").get<std::uint64_t>();
    } catch (const std::exception& ex) {
      err << "error: " << path << ": " << ex.what() << "\n";
      return 2;
    }
    if (log.rows.empty()) {
      err << "error: " << path << ": log has no data rows\n";
      return 2;
    }
    const nlohmann::json& obj = meta.at("objective");
    if (objective.is_null()) {
      objective = obj;
      objective_source = path;
    } else if (obj != objective) {
      err << "error: " << path << " was produced on a different objective "
          << "than " << objective_source << "; refusing to compare\n";
      return 2;
    }
    logs.push_back(std::move(log));
  }

  std::vector<MethodLogs> methods;
  for (const LoadedLog& log : logs) {
    auto it = std::find_if(methods.begin(), methods.end(),
                           [&](const MethodLogs& m) {
                             return m.name == log.method;
                           });
    if (it == methods.end()) {
      methods.push_back({log.method, {}});
      it = methods.end() - 1;
    }
    if (!it->by_seed.emplace(log.seed, &log).second) {
      err << "error: duplicate log for method '" << log.method << "', seed "
          << log.seed << "\n";
      return 2;
    }
  }

  out << "objective: " << objective.value("name", std::string("?"))
      << " (d=" << objective.value("d", 0) << "), " << logs.size()
      << " log(s), " << methods.size() << " method(s)\n\n";

  char line[512];
  std::snprintf(line, sizeof(line), "%-24s %6s %18s %18s\n", "method",
                "seeds", "final loss median", "best seed loss");
  out << line;
  for (const MethodLogs& m : methods) {
    std::vector<double> losses;
    for (const auto& [seed, log] : m.by_seed) losses.push_back(final_loss(*log));
    double best = *std::min_element(losses.begin(), losses.end());
    std::snprintf(line, sizeof(line), "%-24s %6zu %18s %18s\n",
                  m.name.c_str(), m.by_seed.size(),
                  fmt(median(losses), "%.6g").c_str(),
                  fmt(best, "%.6g").c_str());
    out << line;
  }

  if (methods.size() > 1) {
    out << "\npairwise win rate on shared seeds (row beats column; ties count"
           " half):\n";
    std::snprintf(line, sizeof(line), "%-24s", "");
    out << line;
    for (const MethodLogs& m : methods) {
      std::snprintf(line, sizeof(line), " %12.12s", m.name.c_str());
      out << line;
    }
    out << "\n";
    for (const MethodLogs& a : methods) {
      std::snprintf(line, sizeof(line), "%-24s", a.name.c_str());
      out << line;
      for (const MethodLogs& b : methods) {
        if (&a == &b) {
          std::snprintf(line, sizeof(line), " %12s", "-");
          out << line;
          continue;
        }
        double wins = 0.0;
        int shared = 0;
        for (const auto& [seed, log_a] : a.by_seed) {
          auto it = b.by_seed.find(seed);
          if (it == b.by_seed.end()) continue;
          ++shared;
          double la = final_loss(*log_a);
          double lb = final_loss(*it->second);
          if (la < lb) {
            wins += 1.0;
          } else if (la == lb) {
            wins += 0.5;
          }
        }
        if (shared == 0) {
          std::snprintf(line, sizeof(line), " %12s", "-");
        } else {
          std::snprintf(line, sizeof(line), " %12s",
                        fmt(wins / shared, "%.3f").c_str());
        }
        out << line;
      }
      out << "\n";
    }
  }

  if (!options.thresholds.empty()) {
    out << "\nmedian queries to reach loss threshold ('-' when fewer than"
           " half the seeds get there):\n";
    std::snprintf(line, sizeof(line), "%-14s", "threshold");
    out << line;
    for (const MethodLogs& m : methods) {
      std::snprintf(line, sizeof(line), " %12.12s", m.name.c_str());
      out << line;
    }
    out << "\n";
    for (double threshold : options.thresholds) {
      std::snprintf(line, sizeof(line), "%-14s",
                    fmt(threshold, "%.6g").c_str());
      out << line;
      for (const MethodLogs& m : methods) {
        std::vector<double> q2t;
        for (const auto& [seed, log] : m.by_seed) {
          auto q = queries_to(*log, threshold);
          q2t.push_back(q ? static_cast<double>(*q)
                          : std::numeric_limits<double>::infinity());
        }
        double med = median(q2t);
        if (std::isfinite(med)) {
          std::snprintf(line, sizeof(line), " %12s",
                        fmt(med, "%.10g").c_str());
        } else {
          std::snprintf(line, sizeof(line), " %12s", "-");
        }
        out << line;
      }
      out << "\n";
    }
  }

  return 0;
}

}  // namespace sharpzo::cli
