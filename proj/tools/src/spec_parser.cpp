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

#include "spec_parser.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace sharpzo::cli {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct Line {
  int number = 0;
  std::string text;  // trimmed, comments stripped, non-empty
};

std::vector<Line> significant_lines(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    std::string t = trim(raw);
    if (!t.empty()) out.push_back({number, t});
  }
  return out;
}

[[noreturn]] void fail(const std::string& file, int line,
                       const std::string& message) {
  throw SpecError(file + ":" + std::to_string(line) + ": " + message);
}

std::optional<double> to_double(const std::string& v) {
  if (v.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (errno != 0 || end != v.c_str() + v.size() || !std::isfinite(x)) {
    return std::nullopt;
  }
  return x;
}

std::optional<long long> to_int(const std::string& v) {
  if (v.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  long long x = std::strtoll(v.c_str(), &end, 10);
  if (errno != 0 || end != v.c_str() + v.size()) return std::nullopt;
  return x;
}

std::optional<std::uint64_t> to_uint(const std::string& v) {
  if (v.empty() || v[0] == '-') return std::nullopt;
  errno = 0;
  char* end = nullptr;
  unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (errno != 0 || end != v.c_str() + v.size()) return std::nullopt;
  return static_cast<std::uint64_t>(x);
}

std::optional<bool> to_bool(const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  return std::nullopt;
}

struct Entry {
  int line = 0;
  std::string key;
  std::string value;
};

// ---------------------------------------------------------------------------
// Method presets

// Hyperparameter groups, used to reject overrides that the preset's pipeline
// would silently ignore.
enum KeyGroup {
  kSearchCore,   // population, sigma0
  kSharpness,    // rho
  kTransition,   // patience, improve_tol, stage1_cap
  kDescent,      // eta, mu_rge, q, period, sparsity, fisher_batches,
                 // pruning, mu_cge (probe radius for sharpness + curvature)
  kHandoff,      // stage2_init
};

struct Preset {
  const char* name;
  bool cold;
  bool pure_search;
  Stage1Mode stage1_mode;
  PruningMode pruning;
  bool literal_probe_direction;
  bool literal_fisher_scores;
};

constexpr Preset kPresets[] = {
    {"sharpzo", false, false, Stage1Mode::kSharp, PruningMode::kZscore, false,
     false},
    {"cmaes-naive", false, true, Stage1Mode::kNaive, PruningMode::kNone, false,
     false},
    {"zosgd-dense", true, false, Stage1Mode::kNaive, PruningMode::kNone, false,
     false},
    {"zosgd-magnitude", true, false, Stage1Mode::kNaive,
     PruningMode::kMagnitude, false, false},
    {"sharpzo-literal-rge", false, false, Stage1Mode::kSharp,
     PruningMode::kZscore, true, false},
    {"sharpzo-literal-prune", false, false, Stage1Mode::kSharp,
     PruningMode::kZscore, false, true},
};

const Preset* find_preset(const std::string& name) {
  for (const Preset& p : kPresets) {
    if (name == p.name) return &p;
  }
  return nullptr;
}

bool group_applies(const Preset& p, KeyGroup group) {
  if (p.cold) return group == kDescent;
  if (p.pure_search) return group == kSearchCore;
  return true;
}

const char* group_rejection(const Preset& p, KeyGroup group) {
  if (p.cold) {
    return "this method starts descent from w0 with no search stage";
  }
  switch (group) {
    case kSharpness:
      return "this method runs the search stage without sharpness probes";
    case kTransition:
      return "this method keeps searching until the step limit, with no "
             "transition";
    default:
      return "this method runs no descent stage";
  }
}

// ---------------------------------------------------------------------------
// Typed setters

class MethodKeyTable {
 public:
  void apply(const std::string& file, const Entry& e, const Preset& preset,
             RunConfig& cfg) const {
    if (e.key == "population") {
      set_int(file, e, preset, kSearchCore, 2, cfg.population);
    } else if (e.key == "sigma0") {
      set_double(file, e, preset, kSearchCore, cfg.sigma0, kPositive);
    } else if (e.key == "rho") {
      set_double(file, e, preset, kSharpness, cfg.rho, kNonNegative);
    } else if (e.key == "patience") {
      set_int(file, e, preset, kTransition, 1, cfg.patience);
    } else if (e.key == "improve_tol") {
      set_double(file, e, preset, kTransition, cfg.improve_tol, kNonNegative);
    } else if (e.key == "stage1_cap") {
      set_int(file, e, preset, kTransition, 1, cfg.stage1_cap);
    } else if (e.key == "eta") {
      set_double(file, e, preset, kDescent, cfg.eta, kPositive);
    } else if (e.key == "mu_rge") {
      set_double(file, e, preset, kDescent, cfg.mu_rge, kPositive);
    } else if (e.key == "mu_cge") {
      set_double(file, e, preset, kDescent, cfg.mu_cge, kPositive);
    } else if (e.key == "q") {
      set_int(file, e, preset, kDescent, 1, cfg.q);
    } else if (e.key == "period") {
      set_int(file, e, preset, kDescent, 1, cfg.mask_period);
    } else if (e.key == "sparsity") {
      set_double(file, e, preset, kDescent, cfg.sparsity, kUnitInterval);
    } else if (e.key == "fisher_batches") {
      set_int(file, e, preset, kDescent, 0, cfg.fisher_batches);
    } else if (e.key == "pruning") {
      check_group(file, e, preset, kDescent);
      if (e.value == "zscore") {
        cfg.stage2_pruning = PruningMode::kZscore;
      } else if (e.value == "magnitude") {
        cfg.stage2_pruning = PruningMode::kMagnitude;
      } else if (e.value == "none") {
        cfg.stage2_pruning = PruningMode::kNone;
      } else {
        fail(file, e.line,
             "pruning must be one of zscore, magnitude, none; got '" +
                 e.value + "'");
      }
    } else if (e.key == "stage2_init") {
      check_group(file, e, preset, kHandoff);
      if (e.value == "mean") {
        cfg.stage2_init = Stage2Init::kMean;
      } else if (e.value == "best") {
        cfg.stage2_init = Stage2Init::kBestCandidate;
      } else {
        fail(file, e.line,
             "stage2_init must be 'mean' or 'best'; got '" + e.value + "'");
      }
    } else {
      fail(file, e.line,
           "unknown key '" + e.key + "' in [method " + preset.name + "]");
    }
  }

 private:
  enum Range { kPositive, kNonNegative, kUnitInterval };

  static void check_group(const std::string& file, const Entry& e,
                          const Preset& preset, KeyGroup group) {
    if (!group_applies(preset, group)) {
      fail(file, e.line,
           "key '" + e.key + "' does not apply to method '" + preset.name +
               "': " + group_rejection(preset, group));
    }
  }

  static void set_int(const std::string& file, const Entry& e,
                      const Preset& preset, KeyGroup group, long long min,
                      int& out) {
    check_group(file, e, preset, group);
    auto v = to_int(e.value);
    if (!v || *v < min || *v > 1000000000LL) {
      fail(file, e.line,
           "key '" + e.key + "' needs an integer >= " + std::to_string(min) +
               "; got '" + e.value + "'");
    }
    out = static_cast<int>(*v);
  }

  static void set_double(const std::string& file, const Entry& e,
                         const Preset& preset, KeyGroup group, double& out,
                         Range range) {
    check_group(file, e, preset, group);
    auto v = to_double(e.value);
    bool ok = v.has_value();
    if (ok && range == kPositive) ok = *v > 0.0;
    if (ok && range == kNonNegative) ok = *v >= 0.0;
    if (ok && range == kUnitInterval) ok = *v >= 0.0 && *v <= 1.0;
    if (!ok) {
      const char* need = range == kPositive
                             ? "a number > 0"
                             : range == kNonNegative ? "a number >= 0"
                                                     : "a number in [0, 1]";
      fail(file, e.line, "key '" + e.key + "' needs " + std::string(need) +
                             "; got '" + e.value + "'");
    }
    out = *v;
  }
};

// ---------------------------------------------------------------------------
// Seed lists: comma-separated entries, each "n" or "a..b" (inclusive).

std::vector<std::uint64_t> parse_seeds(const std::string& file, int line,
                                       const std::string& value) {
  std::vector<std::uint64_t> seeds;
  std::set<std::uint64_t> seen;
  std::istringstream in(value);
  std::string token;
  while (std::getline(in, token, ',')) {
    token = trim(token);
    std::size_t dots = token.find("..");
    std::uint64_t lo, hi;
    if (dots == std::string::npos) {
      auto v = to_uint(token);
      if (!v) fail(file, line, "bad seed '" + token + "'");
      lo = hi = *v;
    } else {
      auto a = to_uint(trim(token.substr(0, dots)));
      auto b = to_uint(trim(token.substr(dots + 2)));
      if (!a || !b || *a > *b) {
        fail(file, line, "bad seed range '" + token + "'");
      }
      lo = *a;
      hi = *b;
    }
    for (std::uint64_t s = lo;; ++s) {
      if (!seen.insert(s).second) {
        fail(file, line, "duplicate seed " + std::to_string(s));
      }
      seeds.push_back(s);
      if (seeds.size() > 10000) {
        fail(file, line, "seed list too large (over 10000 entries)");
      }
      if (s == hi) break;
    }
  }
  if (seeds.empty()) fail(file, line, "seeds list is empty");
  return seeds;
}

// ---------------------------------------------------------------------------
// Global section

const char* objective_of_key(const std::string& key) {
  if (key == "condition" || key == "noise" || key == "rotated") {
    return "quadratic";
  }
  if (key == "curvature_ratio" || key == "depth_gap" ||
      key == "start_in_sharp") {
    return "two-basin";
  }
  if (key == "features" || key == "classes" || key == "samples" ||
      key == "minibatch" || key == "sample_noise") {
    return "prompt";
  }
  return nullptr;
}

void apply_global(const std::string& file, const Entry& e, ExperimentSpec& spec,
                  bool& saw_budget, bool& saw_steps) {
  ObjectiveDescriptor& obj = spec.objective;
  const std::string kind = obj.name();

  auto need_double = [&](double min_exclusive) {
    auto v = to_double(e.value);
    if (!v || !(*v > min_exclusive)) {
      fail(file, e.line, "key '" + e.key + "' needs a number > " +
                             std::to_string(min_exclusive) + "; got '" +
                             e.value + "'");
    }
    return *v;
  };
  auto need_nonneg = [&] {
    auto v = to_double(e.value);
    if (!v || *v < 0.0) {
      fail(file, e.line,
           "key '" + e.key + "' needs a number >= 0; got '" + e.value + "'");
    }
    return *v;
  };
  auto need_int = [&](long long min) {
    auto v = to_int(e.value);
    if (!v || *v < min || *v > 1000000000LL) {
      fail(file, e.line,
           "key '" + e.key + "' needs an integer >= " + std::to_string(min) +
               "; got '" + e.value + "'");
    }
    return static_cast<int>(*v);
  };
  auto check_objective = [&] {
    const char* owner = objective_of_key(e.key);
    if (owner != nullptr && kind != owner) {
      fail(file, e.line, "key '" + e.key + "' applies to the " +
                             std::string(owner) + " objective, not " + kind);
    }
  };

  if (e.key == "objective") {
    // Handled in the first pass; nothing to do here.
  } else if (e.key == "d") {
    int d = need_int(1);
    obj.quadratic.d = d;
    obj.two_basin.d = d;
    obj.prompt.d = d;
  } else if (e.key == "obj_seed") {
    auto v = to_uint(e.value);
    if (!v) fail(file, e.line, "key 'obj_seed' needs an unsigned integer");
    obj.quadratic.seed = *v;
    obj.two_basin.seed = *v;
    obj.prompt.seed = *v;
  } else if (e.key == "condition") {
    check_objective();
    double v = need_double(0.0);
    if (v < 1.0) fail(file, e.line, "condition must be >= 1");
    obj.quadratic.condition_number = v;
  } else if (e.key == "noise") {
    check_objective();
    obj.quadratic.noise_std = need_nonneg();
  } else if (e.key == "rotated") {
    check_objective();
    auto v = to_bool(e.value);
    if (!v) fail(file, e.line, "key 'rotated' needs true or false");
    obj.quadratic.rotated = *v;
  } else if (e.key == "curvature_ratio") {
    check_objective();
    double v = need_double(1.0);
    obj.two_basin.curvature_ratio = v;
  } else if (e.key == "depth_gap") {
    check_objective();
    obj.two_basin.depth_gap = need_double(0.0);
  } else if (e.key == "start_in_sharp") {
    check_objective();
    auto v = to_bool(e.value);
    if (!v) fail(file, e.line, "key 'start_in_sharp' needs true or false");
    obj.two_basin.start_in_sharp = *v;
  } else if (e.key == "features") {
    check_objective();
    obj.prompt.m = need_int(1);
  } else if (e.key == "classes") {
    check_objective();
    obj.prompt.classes = need_int(2);
  } else if (e.key == "samples") {
    check_objective();
    obj.prompt.samples = need_int(1);
  } else if (e.key == "minibatch") {
    check_objective();
    obj.prompt.minibatch = need_int(1);
  } else if (e.key == "sample_noise") {
    check_objective();
    obj.prompt.sample_noise = need_nonneg();
  } else if (e.key == "seeds") {
    spec.seeds = parse_seeds(file, e.line, e.value);
  } else if (e.key == "budget") {
    auto v = to_int(e.value);
    if (!v || *v < 1) {
      fail(file, e.line, "key 'budget' needs an integer >= 1");
    }
    spec.budget = *v;
    saw_budget = true;
  } else if (e.key == "steps") {
    spec.total_steps = need_int(1);
    saw_steps = true;
  } else if (e.key == "threshold") {
    auto v = to_double(e.value);
    if (!v) fail(file, e.line, "key 'threshold' needs a number");
    spec.threshold = *v;
  } else if (e.key == "out") {
    if (e.value.empty()) fail(file, e.line, "key 'out' needs a path");
    spec.out_dir = e.value;
  } else {
    fail(file, e.line, "unknown key '" + e.key + "'");
  }
}

}  // namespace

int ObjectiveDescriptor::dim() const {
  switch (kind) {
    case ObjectiveKind::kQuadratic: return quadratic.d;
    case ObjectiveKind::kTwoBasin: return two_basin.d;
    case ObjectiveKind::kPrompt: return prompt.d;
  }
  return 0;
}

std::string ObjectiveDescriptor::name() const {
  switch (kind) {
    case ObjectiveKind::kQuadratic: return "quadratic";
    case ObjectiveKind::kTwoBasin: return "two-basin";
    case ObjectiveKind::kPrompt: return "prompt";
  }
  return "";
}

std::unique_ptr<ObjectiveFunction> make_objective(const ObjectiveDescriptor& d) {
  switch (d.kind) {
    case ObjectiveKind::kQuadratic: return make_quadratic(d.quadratic);
    case ObjectiveKind::kTwoBasin: return make_two_basin(d.two_basin);
    case ObjectiveKind::kPrompt: return make_prompt_task(d.prompt);
  }
  throw std::logic_error("make_objective: bad kind");
}

nlohmann::ordered_json objective_json(const ObjectiveDescriptor& d) {
  nlohmann::ordered_json j;
  j["name"] = d.name();
  switch (d.kind) {
    case ObjectiveKind::kQuadratic:
      j["d"] = d.quadratic.d;
      j["condition"] = d.quadratic.condition_number;
      j["noise"] = d.quadratic.noise_std;
      j["rotated"] = d.quadratic.rotated;
      j["obj_seed"] = d.quadratic.seed;
      break;
    case ObjectiveKind::kTwoBasin:
      j["d"] = d.two_basin.d;
      j["curvature_ratio"] = d.two_basin.curvature_ratio;
      j["depth_gap"] = d.two_basin.depth_gap;
      j["start_in_sharp"] = d.two_basin.start_in_sharp;
      j["obj_seed"] = d.two_basin.seed;
      break;
    case ObjectiveKind::kPrompt:
      j["d"] = d.prompt.d;
      j["features"] = d.prompt.m;
      j["classes"] = d.prompt.classes;
      j["samples"] = d.prompt.samples;
      j["minibatch"] = d.prompt.minibatch;
      j["sample_noise"] = d.prompt.sample_noise;
      j["obj_seed"] = d.prompt.seed;
      break;
  }
  return j;
}

const std::vector<std::string>& method_preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Preset& p : kPresets) out.push_back(p.name);
    return out;
  }();
  return names;
}

ExperimentSpec parse_experiment_text(const std::string& text,
                                     const std::string& filename) {
  const std::vector<Line> lines = significant_lines(text);

  // Split into the global prefix and per-method sections.
  std::vector<Entry> global;
  struct Section {
    int line = 0;
    const Preset* preset = nullptr;
    std::vector<Entry> entries;
  };
  std::vector<Section> sections;
  std::set<std::string> used_methods;

  for (const Line& line : lines) {
    if (line.text.front() == '[') {
      if (line.text.back() != ']') {
        fail(filename, line.number, "unterminated section header");
      }
      std::istringstream header(line.text.substr(1, line.text.size() - 2));
      std::string word, name, extra;
      header >> word >> name >> extra;
      if (word != "method" || name.empty() || !extra.empty()) {
        fail(filename, line.number,
             "section header must be [method <name>]");
      }
      const Preset* preset = find_preset(name);
      if (preset == nullptr) {
        std::string valid;
        for (const std::string& n : method_preset_names()) {
          valid += valid.empty() ? n : ", " + n;
        }
        fail(filename, line.number,
             "unknown method '" + name + "' (valid: " + valid + ")");
      }
      if (!used_methods.insert(name).second) {
        fail(filename, line.number, "duplicate [method " + name + "] section");
      }
      sections.push_back({line.number, preset, {}});
      continue;
    }

    std::size_t eq = line.text.find('=');
    if (eq == std::string::npos) {
      fail(filename, line.number, "expected 'key = value'");
    }
    Entry e;
    e.line = line.number;
    e.key = trim(line.text.substr(0, eq));
    e.value = trim(line.text.substr(eq + 1));
    if (e.key.empty()) fail(filename, line.number, "missing key before '='");
    if (sections.empty()) {
      global.push_back(e);
    } else {
      sections.back().entries.push_back(e);
    }
  }

  ExperimentSpec spec;

  // Pass 1: the objective kind decides which global keys are legal.
  bool saw_objective = false;
  for (const Entry& e : global) {
    if (e.key != "objective") continue;
    if (saw_objective) {
      fail(filename, e.line, "duplicate key 'objective'");
    }
    saw_objective = true;
    if (e.value == "quadratic") {
      spec.objective.kind = ObjectiveKind::kQuadratic;
    } else if (e.value == "two-basin") {
      spec.objective.kind = ObjectiveKind::kTwoBasin;
    } else if (e.value == "prompt") {
      spec.objective.kind = ObjectiveKind::kPrompt;
    } else {
      fail(filename, e.line,
           "objective must be one of quadratic, two-basin, prompt; got '" +
               e.value + "'");
    }
  }
  if (!saw_objective) {
    fail(filename, lines.empty() ? 1 : lines.back().number,
         "missing required key 'objective'");
  }

  // Pass 2: everything else, with duplicate detection.
  bool saw_budget = false, saw_steps = false;
  std::set<std::string> seen_keys;
  for (const Entry& e : global) {
    if (e.key != "objective" && !seen_keys.insert(e.key).second) {
      fail(filename, e.line, "duplicate key '" + e.key + "'");
    }
    apply_global(filename, e, spec, saw_budget, saw_steps);
  }

  if (spec.seeds.empty()) {
    fail(filename, lines.back().number, "missing required key 'seeds'");
  }
  if (!saw_budget && !saw_steps) {
    fail(filename, lines.back().number,
         "one of 'budget' or 'steps' is required");
  }

  // Method sections.
  if (sections.empty()) {
    fail(filename, lines.back().number,
         "at least one [method <name>] section is required");
  }
  MethodKeyTable table;
  for (const Section& s : sections) {
    MethodPlan plan;
    plan.name = s.preset->name;
    plan.cold = s.preset->cold;
    plan.pure_search = s.preset->pure_search;
    plan.config.stage1_mode = s.preset->stage1_mode;
    plan.config.stage2_pruning = s.preset->pruning;
    plan.config.literal_probe_direction = s.preset->literal_probe_direction;
    plan.config.literal_fisher_scores = s.preset->literal_fisher_scores;
    std::set<std::string> seen;
    for (const Entry& e : s.entries) {
      if (!seen.insert(e.key).second) {
        fail(filename, e.line,
             "duplicate key '" + e.key + "' in [method " + plan.name + "]");
      }
      table.apply(filename, e, *s.preset, plan.config);
    }
    spec.methods.push_back(std::move(plan));
  }

  // Fail on impossible objective parameters now, while we can still point at
  // the file instead of a worker thread.
  try {
    (void)make_objective(spec.objective);
  } catch (const std::exception& ex) {
    throw SpecError(filename + ": objective rejected: " + ex.what());
  }

  return spec;
}

ExperimentSpec parse_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(path + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_text(buffer.str(), path);
}

}  // namespace sharpzo::cli
