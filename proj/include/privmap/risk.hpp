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
#ifndef PRIVMAP_RISK_HPP_
#define PRIVMAP_RISK_HPP_

#include <map>
#include <vector>

#include "privmap/kernels.hpp"
#include "privmap/losses.hpp"

namespace privmap {

// Labeled training data: n observation vectors over {1..x_card}^s, public
// labels in {-1,+1}, private labels either binary {-1,+1} or m-ary {0..m-1}.
struct TrainingSet {
  std::vector<std::vector<int>> xs;
  std::vector<int> hs;
  std::vector<int> gs;

  int size() const { return static_cast<int>(xs.size()); }
  int sensor_count() const { return xs.empty() ? 0 : static_cast<int>(xs[0].size()); }
  int x_card() const;  // max observation value
  bool g_is_binary() const;
  std::vector<int> g_alphabet() const;  // sorted distinct private labels
  std::map<int, int> g_counts() const;  // |S_g| per class
  void validate() const;                // shapes, alphabets, nonempty classes
};

struct RiskConfig {
  LossSpec loss = LossSpec::from_name("logistic");
  KernelSpec kernel;
  double lambda = 0.0;
  double lambda_n = 0.0;

  // lambda = 1/n, lambda_n = n^{-1/2}.
  static RiskConfig defaults_for(int n);
};

enum class DualRole { kAlphaForH, kBetaForG };

// Length-n dual coefficients; entry i lives in the loss's dual domain
// scaled by n (alpha) or 2|S_{g_i,n}| (beta).
struct DualVector {
  std::vector<double> values;
  DualRole role = DualRole::kBetaForG;
};

// One regularized risk/dual pair over a subset of the training samples.
// Participant a is sample idx[a] with +-1 label sign[a]; the dual variable
// for a is scaled by scale[a] and the primal loss weight is 1/scale[a].
struct RiskForm {
  std::vector<int> idx;
  std::vector<double> sign;
  std::vector<double> scale;
  double reg = 0.0;

  int count() const { return static_cast<int>(idx.size()); }

  static RiskForm for_h(const TrainingSet& ts, const RiskConfig& cfg);
  // Class-normalized risk for binary G (weights 1/(2|S_g|)).
  static RiskForm for_g(const TrainingSet& ts, const RiskConfig& cfg);
  // Pairwise normalized risk for m-ary G restricted to classes {0, g};
  // class 0 maps to -1 and class g to +1.
  static RiskForm for_g_pair(const TrainingSet& ts, const RiskConfig& cfg,
                             int g);
  // Unnormalized G-risk (Bayes-error style metric): weights 1/n,
  // regularizer lambda.
  static RiskForm for_g_unnormalized(const TrainingSet& ts,
                                     const RiskConfig& cfg);
};

// Per-entry dual box for participant a: scale[a] * value in the dual
// domain. Lo/hi may be infinite.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};
Box dual_box(const RiskForm& form, const LossSpec& loss);
// Throws DomainError when any participating entry leaves its box.
void check_dual_in_box(const RiskForm& form, const std::vector<double>& values,
                       const LossSpec& loss);

// Gram matrix of kappa_Q over the training points with per-sensor reuse:
// replacing one sensor's table only recomputes that sensor's contribution
// (count kernel). Other kernels trigger a full rebuild.
class GramCache {
 public:
  GramCache(const TrainingSet& ts, const RiskConfig& cfg, PrivacyMapping q);

  const PrivacyMapping& mapping() const { return q_; }
  void set_block(int t, const std::vector<double>& table);
  // n x n row-major kappa_Q(x_i, x_j).
  const std::vector<double>& full();

 private:
  void rebuild_dots(int t);

  const TrainingSet* ts_;
  RiskConfig cfg_;
  PrivacyMapping q_;
  // Count kernel: per-sensor x_card*x_card row inner products.
  std::vector<std::vector<double>> dots_;
  std::vector<double> full_;
  bool dirty_ = true;
};

// Evaluations against an explicit Gram matrix (n x n over the full
// training set). `values`/`coeffs` are full-length vectors; only
// participating entries are read.
double dual_value_on_gram(const RiskForm& form, const std::vector<double>& values,
                          const std::vector<double>& gram, int n,
                          const LossSpec& loss);
std::vector<double> dual_grad_on_gram(const RiskForm& form,
                                      const std::vector<double>& values,
                                      const std::vector<double>& gram, int n,
                                      const LossSpec& loss);
double primal_value_on_gram(const RiskForm& form,
                            const std::vector<double>& coeffs,
                            const std::vector<double>& gram, int n,
                            const LossSpec& loss);

// Spec-level operations.
double dual_risk_G(const DualVector& beta, const PrivacyMapping& Q,
                   const TrainingSet& ts, const RiskConfig& cfg);
double dual_risk_H(const DualVector& alpha, const PrivacyMapping& Q,
                   const TrainingSet& ts, const RiskConfig& cfg);
double primal_risk_H(const std::vector<double>& w_coeffs,
                     const PrivacyMapping& Q, const TrainingSet& ts,
                     const RiskConfig& cfg);
double primal_risk_G(const std::vector<double>& w_coeffs,
                     const PrivacyMapping& Q, const TrainingSet& ts,
                     const RiskConfig& cfg);
std::vector<double> grad_dual(const DualVector& vec, const PrivacyMapping& Q,
                              const TrainingSet& ts, const RiskConfig& cfg);

// Gradient of dual_risk_G with respect to the entries of Q^t (count kernel
// only); x_card x z_card row-major.
std::vector<double> grad_Q_sensor(int t, const DualVector& beta,
                                  const PrivacyMapping& Q,
                                  const TrainingSet& ts, const RiskConfig& cfg);

// Barrier objective F0 = F(alpha,Q) - (1/mu) sum_g log(Rg*(beta_g,Q) - theta)
// with w_H carried as representer coefficients alpha over the training
// points, and its gradient in block t (count kernel only).
double npo_objective(const std::vector<double>& alpha,
                     const std::vector<const std::vector<double>*>& betas,
                     const std::vector<RiskForm>& beta_forms, double theta,
                     double mu, const PrivacyMapping& Q, const TrainingSet& ts,
                     const RiskConfig& cfg);
std::vector<double> grad_Q_sensor_npo(
    int t, const std::vector<double>& alpha,
    const std::vector<const std::vector<double>*>& betas,
    const std::vector<RiskForm>& beta_forms, double theta, double mu,
    const PrivacyMapping& Q, const TrainingSet& ts, const RiskConfig& cfg);
// Binary-G convenience overload.
std::vector<double> grad_Q_sensor_npo(int t, const DualVector& alpha,
                                      const DualVector& beta, double theta,
                                      double mu, const PrivacyMapping& Q,
                                      const TrainingSet& ts,
                                      const RiskConfig& cfg);

// <w, Phi_Q(x)> for w = sum_k coeffs[k] Phi_Q(anchors[k]) at each x in
// eval_xs; coefficients carry their label signs.
std::vector<double> anchored_margins(
    const std::vector<std::vector<int>>& anchors,
    const std::vector<double>& coeffs,
    const std::vector<std::vector<int>>& eval_xs, const PrivacyMapping& Q,
    const KernelSpec& kernel);
double anchored_norm_sq(const std::vector<std::vector<int>>& anchors,
                        const std::vector<double>& coeffs,
                        const PrivacyMapping& Q, const KernelSpec& kernel);

}  // namespace privmap

#endif  // PRIVMAP_RISK_HPP_
