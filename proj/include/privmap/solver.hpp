// Copyright 2026 The privmap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef PRIVMAP_SOLVER_HPP_
#define PRIVMAP_SOLVER_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "privmap/risk.hpp"

namespace privmap {

struct InnerConfig {
  int max_iters = 500;
  double tol = 1e-12;          // relative objective change
  double armijo_shrink = 0.5;
  double armijo_slope = 1e-4;
  double step0 = 1.0;
};

struct SolverConfig {
  int z_card = 2;  // message alphabet size |Z|
  double delta1 = 0.005;
  double delta2 = 0.005;
  double mu = 100.0;
  double p_ratio = 0.999;
  double stop_tol = 1e-4;  // relative objective change across sweeps
  int max_outer = 200;
  InnerConfig inner;
  std::uint64_t seed = 0;

  void validate(int z_card, int x_card) const;
};

struct TraceRow {
  int iter = 0;
  double objective = 0.0;
  double slack = 0.0;  // min constraint slack (barrier stage only)
};

struct ThetaStarResult {
  double theta_star = 0.0;
  DualVector beta;
  PrivacyMapping Q;
  std::vector<TraceRow> trace;
  bool converged = false;
};

struct SolveResult {
  DualVector alpha;
  std::vector<DualVector> betas;  // one per privacy constraint
  PrivacyMapping Q;
  double theta_star = 0.0;
  double theta = 0.0;
  std::vector<double> theta_stars;  // per pair for m-ary runs
  std::vector<TraceRow> trace;
  std::vector<std::vector<TraceRow>> stage1_traces;  // per constraint
  bool converged = false;
};

// Euclidean projection onto the probability simplex (sorted-threshold).
std::vector<double> project_to_simplex(std::vector<double> v);

// Simplex projection followed by the band repair for constraint (|Q - 1/|Z||
// >= delta2): entries inside the open band move to the nearer edge and the
// row is re-normalized through its largest entry, up to max_passes times.
// Returns false when the repair fails to settle.
bool project_row_qprime(std::vector<double>& row, double delta2,
                        int max_passes = 10);

// Rows drawn uniformly on the simplex, then repaired into the constrained
// set; throws InfeasibleProjection after too many failed draws.
PrivacyMapping random_qprime_mapping(int s, int x_card, int z_card,
                                     const SolverConfig& scfg, Rng& rng);

// Inner convex solves: projected-gradient ascent of the concave duals over
// the per-entry boxes. An empty warm start begins mid-box.
DualVector maximize_beta(const PrivacyMapping& Q, const TrainingSet& ts,
                         const RiskConfig& cfg, const SolverConfig& scfg,
                         std::optional<DualVector> warm = std::nullopt);
DualVector maximize_alpha(const PrivacyMapping& Q, const TrainingSet& ts,
                          const RiskConfig& cfg, const SolverConfig& scfg,
                          std::optional<DualVector> warm = std::nullopt);

// One block Gauss-Seidel step on sensor t. The Algorithm-1 flavor ascends
// the dual in Q^t over the constrained set; the Algorithm-2 flavor descends
// the barrier objective over the simplex. Neither ever worsens its
// objective: steps that cannot be repaired or would lose feasibility are
// rejected in favor of the current block.
PrivacyMapping update_Q_block_alg1(int t, const DualVector& beta,
                                   const PrivacyMapping& Q,
                                   const TrainingSet& ts,
                                   const RiskConfig& cfg,
                                   const SolverConfig& scfg);
PrivacyMapping update_Q_block_alg2(int t, const DualVector& alpha,
                                   const DualVector& beta,
                                   const PrivacyMapping& Q,
                                   const TrainingSet& ts, double theta,
                                   const RiskConfig& cfg,
                                   const SolverConfig& scfg);

// Stage one: block Gauss-Seidel maximization of the constraint dual over
// (beta, Q in Q'); the final objective is the privacy threshold ceiling.
ThetaStarResult find_theta_star(const TrainingSet& ts, const RiskConfig& cfg,
                                const SolverConfig& scfg);

// Stage two: barrier descent of F0 over (alpha, beta, Q^1..Q^s) from a
// feasible warm start. theta = -inf disables the constraint entirely.
SolveResult optimize_npo(const TrainingSet& ts, double theta,
                         const DualVector& warm_beta,
                         const PrivacyMapping& warm_Q, const RiskConfig& cfg,
                         const SolverConfig& scfg);

// m-ary private hypothesis: runs stage one per class pair (0, g), sets
// theta = p * min_g theta*_g, then descends with m-1 barrier terms.
SolveResult optimize_npo_mary(const TrainingSet& ts, const RiskConfig& cfg,
                              const SolverConfig& scfg);

// Same pipeline with the unnormalized (Bayes-error style) G-risk as the
// constraint metric.
SolveResult optimize_bayes_metric(const TrainingSet& ts, const RiskConfig& cfg,
                                  const SolverConfig& scfg);

// Binary pipeline: find_theta_star, theta = p_ratio * theta*, optimize_npo.
SolveResult solve_npo_pipeline(const TrainingSet& ts, const RiskConfig& cfg,
                               const SolverConfig& scfg);

enum class PredictMode { kExpected, kSampled };

// Fusion-center decision for H at observation x; ties resolve to +1.
// Sampled mode draws one message per sensor through Q (count kernel only).
int predict_H(const SolveResult& result, const TrainingSet& ts,
              const RiskConfig& cfg, const std::vector<int>& x,
              PredictMode mode, std::uint64_t sample_seed = 0);

}  // namespace privmap

#endif  // PRIVMAP_SOLVER_HPP_
