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

#ifndef SHARPZO_TOOLS_RUNLOG_IO_HPP_
#define SHARPZO_TOOLS_RUNLOG_IO_HPP_

#include <string>
#include <vector>

#include <json.hpp>

namespace sharpzo::cli {

// One parsed CSV row; mirrors the log schema
// (step, stage, queries, train_loss, val_metric, sigma, active_coords, wall_ms).
struct LogRow {
  int step = 0;
  int stage = 0;
  long long queries = 0;
  double train_loss = 0;
  double val_metric = 0;
  double sigma = 0;
  int active_coords = 0;
  double wall_ms = 0;
};

// Reads a run log, insisting on the exact schema header. Throws
// std::runtime_error with the offending line on any malformed content.
std::vector<LogRow> read_run_csv(const std::string& path);

nlohmann::json read_json_file(const std::string& path);

// Writes content to `path` via a temporary file in the same directory plus an
// atomic rename, so readers never observe a half-written file.
void atomic_write_file(const std::string& path, const std::string& content);

// The sidecar metadata path for a log: "x.csv" -> "x.meta.json". Throws if
// the path does not end in ".csv".
std::string meta_path_for(const std::string& csv_path);

}  // namespace sharpzo::cli

#endif  // SHARPZO_TOOLS_RUNLOG_IO_HPP_
