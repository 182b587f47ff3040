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
#include "privmap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "privmap/errors.hpp"

namespace privmap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kMaxStates = 1 << 20;

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
  return h;
}

}  // namespace

double JointModel::prior_g(int gi) const {
  double total = 0.0;
  for (int hi = 0; hi < h_count(); ++hi) total += joint_hg(hi, gi);
  return total;
}

double JointModel::prior_h(int hi) const {
  double total = 0.0;
  for (int gi = 0; gi < g_count(); ++gi) total += joint_hg(hi, gi);
  return total;
}

void JointModel::validate(double tol) const {
  if (static_cast<int>(cond.size()) != s)
    throw DomainError("joint model has wrong sensor count");
  double mass = 0.0;
  for (double v : p_hg) {
    if (v < 0.0) throw DomainError("negative (H,G) cell");
    mass += v;
  }
  if (std::abs(mass - 1.0) > tol)
    throw DomainError("(H,G) joint mass " + std::to_string(mass));
  for (int gi = 0; gi < g_count(); ++gi)
    if (prior_g(gi) <= 0.0)
      throw DomainError("private prior must be positive for every class");
  for (int t = 0; t < s; ++t) {
    if (static_cast<int>(cond[t].size()) !=
        h_count() * g_count() * x_card)
      throw DomainError("conditional table has wrong shape");
    for (int hi = 0; hi < h_count(); ++hi)
      for (int gi = 0; gi < g_count(); ++gi) {
        double rowsum = 0.0;
        for (int x = 1; x <= x_card; ++x) {
          const double v = cond_x(t, x, hi, gi);
          if (v < 0.0) throw DomainError("negative conditional entry");
          rowsum += v;
        }
        if (std::abs(rowsum - 1.0) > tol)
          throw DomainError("conditional row mass " + std::to_string(rowsum));
      }
  }
}

JointModel::Sample JointModel::sample(Rng& rng) const {
  Sample out;
  const int cell = rng.discrete(p_hg);
  out.hi = cell / g_count();
  out.gi = cell % g_count();
  out.x.resize(s);
  for (int t = 0; t < s; ++t) {
    std::vector<double> row(x_card);
    for (int x = 1; x <= x_card; ++x) row[x - 1] = cond_x(t, x, out.hi, out.gi);
    out.x[t] = rng.discrete(row) + 1;
  }
  return out;
}

double LabeledPmf::outcome_mass(int o) const {
  double total = 0.0;
  for (int l = 0; l < labels; ++l) total += at(o, l);
  return total;
}

double LabeledPmf::label_mass(int l) const {
  double total = 0.0;
  for (int o = 0; o < outcomes; ++o) total += at(o, l);
  return total;
}

std::int64_t InducedJoint::z_states() const {
  std::int64_t states = 1;
  for (int t = 0; t < s; ++t) states *= z_card;
  return states;
}

LabeledPmf InducedJoint::zg() const {
  LabeledPmf out;
  out.outcomes = static_cast<int>(z_states());
  out.labels = g_count();
  out.p.assign(static_cast<std::size_t>(out.outcomes) * out.labels, 0.0);
  for (int o = 0; o < out.outcomes; ++o)
    for (int hi = 0; hi < h_count(); ++hi)
      for (int gi = 0; gi < g_count(); ++gi)
        out.p[static_cast<std::size_t>(o) * out.labels + gi] +=
            p[static_cast<std::size_t>(o) * h_count() * g_count() +
              hi * g_count() + gi];
  return out;
}

LabeledPmf InducedJoint::zh() const {
  LabeledPmf out;
  out.outcomes = static_cast<int>(z_states());
  out.labels = h_count();
  out.p.assign(static_cast<std::size_t>(out.outcomes) * out.labels, 0.0);
  for (int o = 0; o < out.outcomes; ++o)
    for (int hi = 0; hi < h_count(); ++hi)
      for (int gi = 0; gi < g_count(); ++gi)
        out.p[static_cast<std::size_t>(o) * out.labels + hi] +=
            p[static_cast<std::size_t>(o) * h_count() * g_count() +
              hi * g_count() + gi];
  return out;
}

std::vector<double> InducedJoint::cond_z_given_g(int gi) const {
  const auto joint = zg();
  const double prior = joint.label_mass(gi);
  if (prior <= 0.0) throw DomainError("conditioning on zero-mass class");
  std::vector<double> out(joint.outcomes);
  for (int o = 0; o < joint.outcomes; ++o) out[o] = joint.at(o, gi) / prior;
  return out;
}

InducedJoint induced_joint(const PrivacyMapping& Q, const JointModel& jm) {
  std::int64_t states = 1;
  for (int t = 0; t < jm.s; ++t) {
    states *= Q.z_card;
    if (states > kMaxStates)
      throw SupportTooLarge("|Z|^s exceeds the exact-enumeration gate");
  }
  InducedJoint out;
  out.s = jm.s;
  out.z_card = Q.z_card;
  out.h_vals = jm.h_vals;
  out.g_vals = jm.g_vals;
  const int hg = jm.h_count() * jm.g_count();
  out.p.assign(static_cast<std::size_t>(states) * hg, 0.0);

  // Per (t, h, g): mixed message distribution A[z] = sum_x Q(z|x) p(x|h,g).
  std::vector<std::vector<double>> mixed(
      static_cast<std::size_t>(jm.s) * hg,
      std::vector<double>(Q.z_card, 0.0));
  for (int t = 0; t < jm.s; ++t)
    for (int hi = 0; hi < jm.h_count(); ++hi)
      for (int gi = 0; gi < jm.g_count(); ++gi) {
        auto& a = mixed[static_cast<std::size_t>(t) * hg + hi * jm.g_count() + gi];
        for (int x = 1; x <= jm.x_card; ++x) {
          const double px = jm.cond_x(t, x, hi, gi);
          if (px == 0.0) continue;
          for (int z = 1; z <= Q.z_card; ++z)
            a[z - 1] += Q.at(t, x, z) * px;
        }
      }

  std::vector<int> digits(jm.s, 0);
  for (std::int64_t zi = 0; zi < states; ++zi) {
    for (int hi = 0; hi < jm.h_count(); ++hi)
      for (int gi = 0; gi < jm.g_count(); ++gi) {
        double prob = jm.joint_hg(hi, gi);
        for (int t = 0; t < jm.s && prob != 0.0; ++t)
          prob *= mixed[static_cast<std::size_t>(t) * hg + hi * jm.g_count() +
                        gi][digits[t]];
        out.p[static_cast<std::size_t>(zi) * hg + hi * jm.g_count() + gi] =
            prob;
      }
    int t = 0;
    while (t < jm.s && digits[t] == Q.z_card - 1) digits[t++] = 0;
    if (t < jm.s) ++digits[t];
  }
  return out;
}

InducedJoint raw_observation_joint(const JointModel& jm) {
  // Identity mapping: each sensor forwards its observation.
  std::vector<std::vector<int>> maps(jm.s, std::vector<int>(jm.x_card));
  for (auto& m : maps)
    for (int x = 1; x <= jm.x_card; ++x) m[x - 1] = x;
  return induced_joint(PrivacyMapping::deterministic(maps, jm.x_card), jm);
}

double bayes_error(const LabeledPmf& pzl) {
  double err = 0.0;
  for (int o = 0; o < pzl.outcomes; ++o) {
    double mass = 0.0, best = 0.0;
    for (int l = 0; l < pzl.labels; ++l) {
      mass += pzl.at(o, l);
      best = std::max(best, pzl.at(o, l));
    }
    err += mass - best;
  }
  return err;
}

namespace {

void require_common_support(const std::vector<double>& p_plus,
                            const std::vector<double>& p_minus) {
  if (p_plus.size() != p_minus.size())
    throw SupportMismatch("conditionals have different lengths");
  for (std::size_t o = 0; o < p_plus.size(); ++o)
    if ((p_plus[o] > 0.0) != (p_minus[o] > 0.0))
      throw SupportMismatch("conditional supports differ at state " +
                            std::to_string(o));
}

}  // namespace

double min_risk_R(const std::vector<double>& p_plus,
                  const std::vector<double>& p_minus) {
  require_common_support(p_plus, p_minus);
  // R = 1/2 - (1/2) sum_{z: l(z) >= 1} (p(z|1) - p(z|-1)).
  double gamma_sum = 0.0;
  for (std::size_t o = 0; o < p_plus.size(); ++o) {
    if (p_plus[o] <= 0.0) continue;
    if (p_plus[o] >= p_minus[o]) gamma_sum += p_plus[o] - p_minus[o];
  }
  return 0.5 - 0.5 * gamma_sum;
}

double compute_c(const std::vector<double>& p_plus,
                 const std::vector<double>& p_minus) {
  require_common_support(p_plus, p_minus);
  double lmin = kInf, lmax = -kInf;
  for (std::size_t o = 0; o < p_plus.size(); ++o) {
    if (p_plus[o] <= 0.0) continue;
    const double ratio = p_plus[o] / p_minus[o];
    lmin = std::min(lmin, ratio);
    lmax = std::max(lmax, ratio);
  }
  if (!std::isfinite(lmin)) throw SupportMismatch("empty common support");
  double mass_min = 0.0, mass_max = 0.0;
  for (std::size_t o = 0; o < p_plus.size(); ++o) {
    if (p_plus[o] <= 0.0) continue;
    const double ratio = p_plus[o] / p_minus[o];
    if (nearly_equal(ratio, lmin)) mass_min += p_minus[o];
    if (nearly_equal(ratio, lmax)) mass_max += p_plus[o];
  }
  return std::min(mass_min, mass_max);
}

double compute_c_prime(const std::vector<std::vector<double>>& cond_by_class) {
  if (cond_by_class.size() < 2)
    throw DomainError("c' needs at least two classes");
  double c = kInf;
  for (std::size_t g = 1; g < cond_by_class.size(); ++g)
    c = std::min(c, compute_c(cond_by_class[g], cond_by_class[0]));
  return c;
}

const char* certificate_kind_name(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::kExactProp1:
      return "exact_prop1";
    case CertificateKind::kWeakThm1:
      return "weak_thm1";
    case CertificateKind::kMaryThm2:
      return "mary_thm2";
    case CertificateKind::kMaryWeakThm3:
      return "mary_weak_thm3";
  }
  return "unknown";
}

PrivacyCertificate budget_exact(double theta, double c, bool mary) {
  if (theta < 0.0 || theta > 0.5)
    throw DomainError("theta must lie in [0, 1/2]");
  if (c <= 0.0 || c > 1.0) throw DomainError("c must lie in (0, 1]");
  PrivacyCertificate cert;
  cert.theta = theta;
  cert.c = c;
  cert.kind = mary ? CertificateKind::kMaryThm2 : CertificateKind::kExactProp1;
  const double denom = std::max(c + 2.0 * theta - 1.0, 0.0);
  if (denom <= 0.0) {
    cert.epsilon = kInf;
  } else {
    cert.epsilon = std::log(c / denom);
    if (mary) cert.epsilon *= 2.0;
    cert.epsilon = std::max(cert.epsilon, 0.0);
  }
  return cert;
}

PrivacyCertificate budget_weak(double theta, double delta,
                               const LossSpec& loss, double c, bool mary) {
  if (delta <= 0.0 || delta > 1.0) throw DomainError("delta must be in (0, 1]");
  if (c <= 0.0 || c > 1.0) throw DomainError("c must lie in (0, 1]");
  PrivacyCertificate cert;
  cert.theta = theta;
  cert.c = c;
  cert.delta = delta;
  cert.kind =
      mary ? CertificateKind::kMaryWeakThm3 : CertificateKind::kWeakThm1;
  const double arg = std::max(loss.phi_at_zero() - theta + delta, 0.0);
  const double denom =
      c - 2.0 * loss.a() * std::pow(arg, 1.0 / loss.r());
  if (denom <= 0.0) {
    cert.epsilon = kInf;
  } else {
    cert.epsilon = std::log(c / denom);
    if (mary) cert.epsilon *= 0.5;
    cert.epsilon = std::max(cert.epsilon, 0.0);
  }
  return cert;
}

double fano_risk_bound(double epsilon, const std::vector<double>& priors) {
  if (epsilon < 0.0) throw DomainError("epsilon must be nonnegative");
  double hg = 0.0;
  double pmax = 0.0;
  for (double p : priors) {
    if (p < 0.0) throw DomainError("negative prior");
    if (p > 0.0) hg -= p * std::log(p);
    pmax = std::max(pmax, p);
  }
  if (epsilon > hg)
    throw BudgetTooLarge("epsilon " + std::to_string(epsilon) +
                         " exceeds prior entropy " + std::to_string(hg));
  const double target = hg - epsilon;
  // Largest theta in [0, 1/2] with H(theta) <= target; H is increasing there.
  double lo = 0.0, hi = 0.5;
  if (binary_entropy(hi) <= target) {
    lo = hi;
  } else {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (binary_entropy(mid) <= target)
        lo = mid;
      else
        hi = mid;
    }
  }
  return lo / (2.0 * pmax);
}

double posterior_ratio_extremes(const LabeledPmf& pzg) {
  std::vector<double> pg(pzg.labels);
  for (int l = 0; l < pzg.labels; ++l) pg[l] = pzg.label_mass(l);
  double eps = 0.0;
  for (int o = 0; o < pzg.outcomes; ++o) {
    const double pz = pzg.outcome_mass(o);
    if (pz <= 0.0) continue;
    for (int l = 0; l < pzg.labels; ++l) {
      const double cell = pzg.at(o, l);
      if (cell <= 0.0) continue;  // zero-mass cells never occur a.s.
      eps = std::max(eps, std::abs(std::log(cell / (pz * pg[l]))));
    }
  }
  return eps;
}

double estimate_epsilon_hat(
    const std::vector<std::pair<int, std::vector<int>>>& samples) {
  if (samples.empty()) throw DomainError("epsilon-hat needs samples");
  std::map<std::pair<int, std::vector<int>>, std::int64_t> cells;
  std::map<int, std::int64_t> g_counts;
  std::map<std::vector<int>, std::int64_t> z_counts;
  for (const auto& sample : samples) {
    ++cells[sample];
    ++g_counts[sample.first];
    ++z_counts[sample.second];
  }
  const double total = static_cast<double>(samples.size());
  double eps = 0.0;
  for (const auto& [cell, count] : cells) {
    const double joint = static_cast<double>(count) / total;
    const double pg = static_cast<double>(g_counts.at(cell.first)) / total;
    const double pz = static_cast<double>(z_counts.at(cell.second)) / total;
    eps = std::max(eps, std::abs(std::log(joint / (pg * pz))));
  }
  return eps;
}

}  // namespace privmap
