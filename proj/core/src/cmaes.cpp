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

#include "sharpzo/cmaes.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sharpzo/estimators.hpp"

namespace sharpzo {

CmaConstants CmaConstants::make(int dim, int lambda) {
  if (dim < 1) throw std::invalid_argument("cmaes: dimension must be >= 1");
  if (lambda < 2) {
    throw std::invalid_argument("cmaes: population must be >= 2, got " +
                                std::to_string(lambda));
  }
  CmaConstants k;
  k.lambda = lambda;
  k.mu = lambda / 2;

  k.weights.resize(k.mu);
  for (int i = 0; i < k.mu; ++i) {
    k.weights[i] = std::log((lambda + 1) / 2.0) - std::log(i + 1.0);
  }
  k.weights /= k.weights.sum();

  double sum_sq = k.weights.squaredNorm();
  k.mueff = 1.0 / sum_sq;

  const double n = static_cast<double>(dim);
  k.c_sigma = (k.mueff + 2.0) / (n + k.mueff + 5.0);
  k.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((k.mueff - 1.0) / (n + 1.0)) - 1.0) +
              k.c_sigma;
  k.c_c = (4.0 + k.mueff / n) / (n + 4.0 + 2.0 * k.mueff / n);
  k.c1 = 2.0 / ((n + 1.3) * (n + 1.3) + k.mueff);
  k.c_mu = std::min(1.0 - k.c1, 2.0 * (k.mueff - 2.0 + 1.0 / k.mueff) /
                                    ((n + 2.0) * (n + 2.0) + k.mueff));
  k.chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
  k.eig_period = std::max(
      1, static_cast<int>(1.0 / (10.0 * n * (k.c1 + k.c_mu))));
  return k;
}

CmaState::CmaState(const Vector& theta0, double sigma0, int population)
    : constants(CmaConstants::make(static_cast<int>(theta0.size()), population)),
      theta(theta0),
      sigma(sigma0) {
  if (!theta0.allFinite()) {
    throw std::invalid_argument("cmaes: initial mean has non-finite entries");
  }
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) {
    throw std::invalid_argument("cmaes: sigma0 must be positive and finite");
  }
  const int d = dim();
  cov = Matrix::Identity(d, d);
  p_sigma = Vector::Zero(d);
  p_c = Vector::Zero(d);
  basis = Matrix::Identity(d, d);
  sqrt_eigs = Vector::Ones(d);
}

void CmaState::refresh_eigensystem(bool force) {
  if (!force && stale_generations < constants.eig_period) return;

  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw CovarianceDegenerate("cmaes: eigendecomposition failed");
  }
  double trace = cov.trace();
  if (!(trace > 0.0) || !std::isfinite(trace)) {
    throw CovarianceDegenerate("cmaes: covariance trace is not positive");
  }
  const double floor = 1e-14 * trace / dim();
  Vector eigs = solver.eigenvalues();
  bool clamped = false;
  for (int i = 0; i < eigs.size(); ++i) {
    if (eigs[i] < floor) {
      eigs[i] = floor;
      clamped = true;
    }
  }
  basis = solver.eigenvectors();
  if (clamped) {
    cov = basis * eigs.asDiagonal() * basis.transpose();
    cov = 0.5 * (cov + cov.transpose()).eval();
  }
  sqrt_eigs = eigs.cwiseSqrt();
  stale_generations = 0;
}

Vector CmaState::transform(const Vector& z) const {
  return basis * sqrt_eigs.cwiseProduct(z);
}

std::vector<Candidate> sample_population(CmaState& state,
                                         const Vector& eps_star,
                                         RngStream& stream) {
  const int d = state.dim();
  if (eps_star.size() != 0 && eps_star.size() != d) {
    throw std::invalid_argument("sample_population: eps_star length mismatch");
  }
  const bool shifted =
      eps_star.size() == d && eps_star.squaredNorm() != 0.0;

  state.refresh_eigensystem();

  std::vector<Candidate> population(
      static_cast<std::size_t>(state.constants.lambda));
  for (int i = 0; i < state.constants.lambda; ++i) {
    Candidate& c = population[static_cast<std::size_t>(i)];
    RngStream sub = stream.substream(static_cast<std::uint64_t>(i));
    c.z = gaussian_vector(sub, d);
    c.w = state.theta + state.sigma * state.transform(c.z);
    if (shifted) c.w += eps_star;
  }
  return population;
}

void evaluate_population(const ObjectiveFunction& obj,
                         std::vector<Candidate>& population,
                         RngStream& stream) {
  for (std::size_t i = 0; i < population.size(); ++i) {
    RngStream sub = stream.substream(static_cast<std::uint64_t>(i));
    population[i].fitness = obj.evaluate(population[i].w, sub);
  }
}

void update_state(CmaState& state, const std::vector<Candidate>& population) {
  const CmaConstants& k = state.constants;
  const int d = state.dim();
  if (static_cast<int>(population.size()) != k.lambda) {
    throw std::invalid_argument("update_state: population size mismatch");
  }
  for (const Candidate& c : population) {
    if (c.w.size() != d || c.z.size() != d) {
      throw std::invalid_argument("update_state: candidate dimension mismatch");
    }
  }

  // Rank: finite fitness ascending, non-finite last, stable by index.
  std::vector<int> order(population.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    bool fa = std::isfinite(population[static_cast<std::size_t>(a)].fitness);
    bool fb = std::isfinite(population[static_cast<std::size_t>(b)].fitness);
    if (fa != fb) return fa;
    if (!fa) return false;
    return population[static_cast<std::size_t>(a)].fitness <
           population[static_cast<std::size_t>(b)].fitness;
  });

  int parents = 0;
  while (parents < k.mu &&
         std::isfinite(
             population[static_cast<std::size_t>(order[static_cast<std::size_t>(
                             parents)])].fitness)) {
    ++parents;
  }

  // Selection averages in the sampling frame. Weights renormalized if
  // non-finite candidates crowded out part of the parent set.
  Vector weights = k.weights.head(parents);
  if (parents > 0 && parents < k.mu) weights /= weights.sum();

  Vector z_w = Vector::Zero(d);
  Vector y_w = Vector::Zero(d);
  Vector theta_new = Vector::Zero(d);
  std::vector<Vector> parent_y(static_cast<std::size_t>(parents));
  for (int i = 0; i < parents; ++i) {
    const Candidate& c =
        population[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    parent_y[static_cast<std::size_t>(i)] = state.transform(c.z);
    z_w += weights[i] * c.z;
    y_w += weights[i] * parent_y[static_cast<std::size_t>(i)];
    theta_new += weights[i] * c.w;
  }
  if (parents == 0) theta_new = state.theta;

  // Step-size path uses the whitened selection average B z_w = C^{-1/2} y_w.
  double cs = k.c_sigma;
  state.p_sigma = (1.0 - cs) * state.p_sigma +
                  std::sqrt(cs * (2.0 - cs) * k.mueff) * (state.basis * z_w);

  double ps_norm = state.p_sigma.norm();
  double decay = 1.0 - std::pow(1.0 - cs, 2.0 * (state.generation + 1));
  bool hsig = ps_norm / std::sqrt(decay) <
              (1.4 + 2.0 / (d + 1.0)) * k.chi_n;

  double cc = k.c_c;
  state.p_c = (1.0 - cc) * state.p_c;
  if (hsig) {
    state.p_c += std::sqrt(cc * (2.0 - cc) * k.mueff) * y_w;
  }

  Matrix rank_mu = Matrix::Zero(d, d);
  for (int i = 0; i < parents; ++i) {
    const Vector& y = parent_y[static_cast<std::size_t>(i)];
    rank_mu.noalias() += weights[i] * (y * y.transpose());
  }

  double stall = hsig ? 0.0 : cc * (2.0 - cc);
  state.cov = (1.0 - k.c1 - k.c_mu) * state.cov +
              k.c1 * (state.p_c * state.p_c.transpose() + stall * state.cov) +
              k.c_mu * rank_mu;
  state.cov = 0.5 * (state.cov + state.cov.transpose()).eval();

  state.sigma *= std::exp((cs / k.d_sigma) * (ps_norm / k.chi_n - 1.0));
  if (!(state.sigma > 0.0) || !std::isfinite(state.sigma)) {
    throw CovarianceDegenerate("cmaes: step size left the positive range");
  }

  state.theta = theta_new;
  state.generation += 1;
  state.stale_generations += 1;
}

GenerationRecord sharpness_step(CmaState& state, const ObjectiveFunction& obj,
                                const SharpStepOptions& options,
                                RngStream& stream) {
  if (obj.dim() != state.dim()) {
    throw std::invalid_argument("sharpness_step: objective dimension mismatch");
  }

  GenerationRecord record;
  Vector eps_star;
  if (options.sharpness) {
    RngStream cge_stream = stream.substream(streams::kCge);
    GradientEstimate g =
        cge_estimate(obj, state.theta, options.mu_cge, cge_stream);
    eps_star = sam_perturbation(g.grad, options.rho);
    record.grad_norm = g.grad.norm();
    record.queries += g.queries;
  }

  RngStream sample_stream = stream.substream(streams::kSample);
  std::vector<Candidate> population =
      sample_population(state, eps_star, sample_stream);

  RngStream eval_stream = stream.substream(streams::kEvaluate);
  evaluate_population(obj, population, eval_stream);
  record.queries += state.constants.lambda;

  double best = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  int finite = 0;
  for (const Candidate& c : population) {
    if (!std::isfinite(c.fitness)) continue;
    ++finite;
    sum += c.fitness;
    if (c.fitness < best) {
      best = c.fitness;
      record.best_w = c.w;
    }
  }
  record.any_finite = finite > 0;
  record.best_fitness =
      finite > 0 ? best : std::numeric_limits<double>::quiet_NaN();
  record.mean_fitness =
      finite > 0 ? sum / finite : std::numeric_limits<double>::quiet_NaN();
  if (finite == 0) record.best_w = state.theta;

  update_state(state, population);
  record.generation = state.generation;
  record.sigma_after = state.sigma;
  return record;
}

}  // namespace sharpzo
