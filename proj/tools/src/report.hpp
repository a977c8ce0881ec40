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

#ifndef SHARPZO_TOOLS_REPORT_HPP_
#define SHARPZO_TOOLS_REPORT_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace sharpzo::cli {

struct ReportOptions {
  std::vector<double> thresholds;
};

// Cross-method comparison over previously written run logs. Every path must
// name a run CSV with its .meta.json sidecar next to it; all logs must come
// from the same objective, and a (method, seed) pair may appear only once.
//
// Prints per-method medians, a pairwise win-rate matrix over shared seeds
// (a tie counts as half a win), and, for each requested threshold, the
// median query count at which the loss first reaches it.
//
// Returns 0 on success, 2 when the inputs are unusable.
int compare_report(const std::vector<std::string>& paths,
                   const ReportOptions& options, std::ostream& out,
                   std::ostream& err);

}  // namespace sharpzo::cli

#endif  // SHARPZO_TOOLS_REPORT_HPP_
