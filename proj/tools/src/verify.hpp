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

#ifndef SHARPZO_TOOLS_VERIFY_HPP_
#define SHARPZO_TOOLS_VERIFY_HPP_

#include <ostream>

namespace sharpzo::cli {

// Fast self-checks of the numerical core on this machine: estimator
// exactness, mask arithmetic, frozen-coordinate guarantees, score
// standardization, and end-to-end run reproducibility. Prints one PASS/FAIL
// line per check and returns the number of failures.
int run_verification(std::ostream& out);

}  // namespace sharpzo::cli

#endif  // SHARPZO_TOOLS_VERIFY_HPP_
