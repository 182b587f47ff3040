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
#ifndef PRIVMAP_ORACLE_HPP_
#define PRIVMAP_ORACLE_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "privmap/kernels.hpp"
#include "privmap/losses.hpp"
#include "privmap/rng.hpp"

namespace privmap {

// Exact finite joint of (X, H, G) with sensors conditionally independent
// given (H, G): p(x, h, g) = p_hg(h, g) * prod_t cond_t(x^t | h, g). This
// covers every synthetic model used here while keeping m-ary supports
// tractable; small supports can still be enumerated exactly.
struct JointModel {
  int x_card = 0;
  int s = 0;
  std::vector<int> h_vals;  // {-1,+1}
  std::vector<int> g_vals;  // {-1,+1} or {0..m-1}
  std::vector<double> p_hg;  // h_count x g_count row-major
  // cond[t][(hi * g_count + gi) * x_card + (x-1)] = p(x | h, g).
  std::vector<std::vector<double>> cond;

  int h_count() const { return static_cast<int>(h_vals.size()); }
  int g_count() const { return static_cast<int>(g_vals.size()); }
  double joint_hg(int hi, int gi) const { return p_hg[hi * g_count() + gi]; }
  double cond_x(int t, int x, int hi, int gi) const {
    return cond[t][(hi * g_count() + gi) * x_card + (x - 1)];
  }
  double prior_g(int gi) const;
  double prior_h(int hi) const;
  void validate(double tol = 1e-12) const;

  struct Sample {
    int hi = 0, gi = 0;
    std::vector<int> x;
  };
  Sample sample(Rng& rng) const;
};

// Joint pmf over (outcome, label); p[o * labels + l].
struct LabeledPmf {
  int outcomes = 0;
  int labels = 0;
  std::vector<double> p;

  double at(int o, int l) const { return p[o * labels + l]; }
  double outcome_mass(int o) const;
  double label_mass(int l) const;
};

// Exact pmf over (Z^s, H, G); z indexed little-endian in {1..z_card}^s.
struct InducedJoint {
  int s = 0;
  int z_card = 0;
  std::vector<int> h_vals, g_vals;
  std::vector<double> p;  // zidx * (h*g) + hi * g_count + gi

  int h_count() const { return static_cast<int>(h_vals.size()); }
  int g_count() const { return static_cast<int>(g_vals.size()); }
  std::int64_t z_states() const;
  LabeledPmf zg() const;
  LabeledPmf zh() const;
  // p(z | G = g_vals[gi]) over all z states.
  std::vector<double> cond_z_given_g(int gi) const;
};

// p(z,h,g) = sum_x Q(z|x) p(x,h,g), computed exactly through the
// factorization; |Z|^s is gated to 2^20 states.
InducedJoint induced_joint(const PrivacyMapping& Q, const JointModel& jm);
// The Z = X baseline (identity mapping), same gate on |X|^s.
InducedJoint raw_observation_joint(const JointModel& jm);

// Minimum misclassification probability: sum_z (p(z) - max_l p(z, l)).
double bayes_error(const LabeledPmf& pzl);

// Minimum over detectors of the Type I/II error average, from the
// conditionals p(z|label=+1), p(z|label=-1) on a common support.
double min_risk_R(const std::vector<double>& p_plus,
                  const std::vector<double>& p_minus);

// c = min{ P(l(z)=min l | -1), P(l(z)=max l | +1) } with likelihood ratio
// l(z) = p(z|+1)/p(z|-1); ties grouped by relative comparison 1e-12.
double compute_c(const std::vector<double>& p_plus,
                 const std::vector<double>& p_minus);
// c' = min over g=1..m-1 of the pairwise constant against class 0;
// cond_by_class[k] = p(z | G=k).
double compute_c_prime(const std::vector<std::vector<double>>& cond_by_class);

enum class CertificateKind {
  kExactProp1,
  kWeakThm1,
  kMaryThm2,
  kMaryWeakThm3,
};
const char* certificate_kind_name(CertificateKind kind);

struct PrivacyCertificate {
  double theta = 0.0;
  double c = 0.0;
  double delta = 0.0;  // weak kinds only
  double epsilon = 0.0;
  CertificateKind kind = CertificateKind::kExactProp1;
};

// epsilon = log(c / (c + 2 theta - 1)_+), doubled constant form for m-ary;
// a clamped denominator yields +infinity.
PrivacyCertificate budget_exact(double theta, double c, bool mary);
// epsilon = log(c / (c - 2a (phi(0) - theta + delta)^{1/r})_+); halved for
// m-ary.
PrivacyCertificate budget_weak(double theta, double delta,
                               const LossSpec& loss, double c, bool mary);

// Largest theta in [0,1/2] with H(theta) <= H(G) - epsilon (natural-log
// binary entropy), divided by 2 max_g p_G(g).
double fano_risk_bound(double epsilon, const std::vector<double>& priors);

// Smallest budget valid for the joint: max over cells with positive mass
// of |log(p(g|z)/p(g))|.
double posterior_ratio_extremes(const LabeledPmf& pzg);

// Plug-in estimate from (g, z) samples; empty cells are skipped.
double estimate_epsilon_hat(
    const std::vector<std::pair<int, std::vector<int>>>& samples);

}  // namespace privmap

#endif  // PRIVMAP_ORACLE_HPP_
