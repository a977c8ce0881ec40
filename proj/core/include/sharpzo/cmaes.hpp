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

#ifndef SHARPZO_CMAES_HPP_
#define SHARPZO_CMAES_HPP_

#include <limits>
#include <vector>

#include "sharpzo/core.hpp"

namespace sharpzo {

// Strategy constants derived from (dimension, population size) once at
// construction. Standard (mu/mu_w, lambda) settings: ranked log weights,
// cumulative step-size adaptation, rank-one plus rank-mu covariance update.
struct CmaConstants {
  int lambda = 0;    // population size
  int mu = 0;        // parents, floor(lambda / 2)
  Vector weights;    // positive recombination weights, sum exactly 1
  double mueff = 0;  // variance-effective selection mass
  double c_sigma = 0, d_sigma = 0;  // step-size path / damping
  double c_c = 0, c1 = 0, c_mu = 0;  // covariance path and update rates
  double chi_n = 0;  // E||N(0, I_d)||
  int eig_period = 1;  // generations between eigensystem refreshes

  static CmaConstants make(int dim, int lambda);
};

struct Candidate {
  Vector w;  // eps_star + theta + sigma * C^{1/2} z, exactly as sampled
  Vector z;  // the raw standard normal draw behind w
  double fitness = std::numeric_limits<double>::quiet_NaN();
};

class CovarianceDegenerate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Search-distribution state. Fields are public in the usual
// strategy-parameter style; mutate them through the update functions unless
// you are writing a test.
struct CmaState {
  CmaState(const Vector& theta0, double sigma0, int population);

  CmaConstants constants;
  Vector theta;    // distribution mean
  double sigma;    // global step size
  Matrix cov;      // C, kept symmetric
  Vector p_sigma;  // step-size evolution path
  Vector p_c;      // covariance evolution path
  int generation = 0;

  // Cached eigensystem of cov used for sampling: cov = basis * diag(sqrt_eigs^2) * basis^T.
  Matrix basis;
  Vector sqrt_eigs;
  int stale_generations = 0;

  int dim() const { return static_cast<int>(theta.size()); }

  // Recomputes the eigensystem if it is due (or `force`). Applies the
  // eigenvalue floor 1e-14 * trace/dim, rebuilding cov when a clamp fires.
  // Throws CovarianceDegenerate if the decomposition fails or trace <= 0.
  void refresh_eigensystem(bool force = false);

  // C^{1/2} z via the cached eigensystem.
  Vector transform(const Vector& z) const;
};

// lambda candidates w^i = eps_star + theta + sigma * C^{1/2} z^i, one
// substream per candidate. eps_star must be zero-length (treated as zero) or
// dim-sized. An exactly-zero eps_star is skipped so the shifted and unshifted
// paths produce bitwise identical candidates.
std::vector<Candidate> sample_population(CmaState& state,
                                         const Vector& eps_star,
                                         RngStream& stream);

// Fills in fitness via counted objective queries, one substream per
// candidate. Non-finite losses are stored as-is and handled at update time.
void evaluate_population(const ObjectiveFunction& obj,
                         std::vector<Candidate>& population,
                         RngStream& stream);

// One canonical update: recombination of the best mu candidates, CSA
// step-size control, rank-one + rank-mu covariance update. Non-finite
// candidates rank last and are excluded from recombination (weights
// renormalized over the surviving parents).
void update_state(CmaState& state, const std::vector<Candidate>& population);

struct SharpStepOptions {
  double rho = 0.1;      // worst-case perturbation radius
  double mu_cge = 1e-5;  // probe radius for the mean-point gradient
  bool sharpness = true; // false = plain step, no gradient probes at all
};

struct GenerationRecord {
  int generation = 0;       // state generation after the update
  double best_fitness = 0;  // best finite candidate this generation
  Vector best_w;
  double mean_fitness = 0;  // mean over finite candidates
  double grad_norm = 0;     // ||CGE at theta||, 0 in plain mode
  double sigma_after = 0;
  int queries = 0;          // 2d + lambda with sharpness, lambda without
  bool any_finite = false;
};

// One full generation: (optionally) probe the mean, shift sampling by the
// worst-case offset, evaluate, update. Uses named substreams so the plain
// and rho=0 sharp variants walk identical candidate sequences.
GenerationRecord sharpness_step(CmaState& state, const ObjectiveFunction& obj,
                                const SharpStepOptions& options,
                                RngStream& stream);

}  // namespace sharpzo

#endif  // SHARPZO_CMAES_HPP_
