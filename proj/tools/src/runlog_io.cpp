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

#include "runlog_io.hpp"

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sharpzo::cli {
namespace {

constexpr const char* kHeader =
    "step,stage,queries,train_loss,val_metric,sigma,active_coords,wall_ms";

[[noreturn]] void bad_csv(const std::string& path, int line,
                          const std::string& message) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + message);
}

double parse_field_double(const std::string& path, int line,
                          const std::string& field) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(field.c_str(), &end);
  if (field.empty() || errno != 0 || end != field.c_str() + field.size()) {
    bad_csv(path, line, "bad numeric field '" + field + "'");
  }
  return v;
}

long long parse_field_int(const std::string& path, int line,
                          const std::string& field) {
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(field.c_str(), &end, 10);
  if (field.empty() || errno != 0 || end != field.c_str() + field.size()) {
    bad_csv(path, line, "bad integer field '" + field + "'");
  }
  return v;
}

}  // namespace

std::vector<LogRow> read_run_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");

  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw std::runtime_error(path + ":1: missing or wrong header (expected '" +
                             std::string(kHeader) + "')");
  }

  std::vector<LogRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream split(line);
    std::string field;
    while (std::getline(split, field, ',')) fields.push_back(field);
    if (fields.size() != 8) {
      bad_csv(path, line_no, "expected 8 fields, got " +
                                 std::to_string(fields.size()));
    }
    LogRow row;
    row.step = static_cast<int>(parse_field_int(path, line_no, fields[0]));
    row.stage = static_cast<int>(parse_field_int(path, line_no, fields[1]));
    row.queries = parse_field_int(path, line_no, fields[2]);
    row.train_loss = parse_field_double(path, line_no, fields[3]);
    row.val_metric = parse_field_double(path, line_no, fields[4]);
    row.sigma = parse_field_double(path, line_no, fields[5]);
    row.active_coords =
        static_cast<int>(parse_field_int(path, line_no, fields[6]));
    row.wall_ms = parse_field_double(path, line_no, fields[7]);
    if (!rows.empty() && row.step <= rows.back().step) {
      bad_csv(path, line_no, "steps are not strictly increasing");
    }
    if (!rows.empty() && row.queries < rows.back().queries) {
      bad_csv(path, line_no, "query counts decreased");
    }
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& ex) {
    throw std::runtime_error(path + ": " + ex.what());
  }
  return j;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(tmp + ": cannot open for writing");
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error(tmp + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw std::runtime_error("rename " + tmp + " -> " + path + ": " +
                             ec.message());
  }
}

std::string meta_path_for(const std::string& csv_path) {
  constexpr const char* kSuffix = ".csv";
  if (csv_path.size() < 4 ||
      csv_path.compare(csv_path.size() - 4, 4, kSuffix) != 0) {
    throw std::runtime_error(csv_path + ": expected a .csv log path");
  }
  return csv_path.substr(0, csv_path.size() - 4) + ".meta.json";
}

}  // namespace sharpzo::cli
