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

#ifndef SHARPZO_TOOLS_SVG_HPP_
#define SHARPZO_TOOLS_SVG_HPP_

#include <string>
#include <vector>

namespace sharpzo::cli {

// One plotted method: a central curve plus a shaded inter-seed band, all
// sampled on the same x grid. lo/hi may equal the median (degenerate band).
struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> median;
  std::vector<double> lo;
  std::vector<double> hi;
};

// Renders a deterministic standalone SVG line chart. The y axis switches to
// a log scale automatically when every plotted value is positive.
std::string render_chart(const std::string& title, const std::string& x_label,
                         const std::string& y_label,
                         const std::vector<ChartSeries>& series);

}  // namespace sharpzo::cli

#endif  // SHARPZO_TOOLS_SVG_HPP_
