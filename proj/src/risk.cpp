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
#include "privmap/risk.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "count_blocks.hpp"
#include "privmap/errors.hpp"

namespace privmap {

int TrainingSet::x_card() const {
  int card = 0;
  for (const auto& x : xs)
    for (int v : x) card = std::max(card, v);
  return card;
}

bool TrainingSet::g_is_binary() const {
  for (int g : gs)
    if (g != -1 && g != 1) return false;
  return true;
}

std::vector<int> TrainingSet::g_alphabet() const {
  std::set<int> seen(gs.begin(), gs.end());
  return std::vector<int>(seen.begin(), seen.end());
}

std::map<int, int> TrainingSet::g_counts() const {
  std::map<int, int> counts;
  for (int g : gs) ++counts[g];
  return counts;
}

void TrainingSet::validate() const {
  const int n = size();
  if (n == 0) throw DomainError("empty training set");
  if (static_cast<int>(hs.size()) != n || static_cast<int>(gs.size()) != n)
    throw DomainError("label vectors do not match sample count");
  const int s = sensor_count();
  for (const auto& x : xs) {
    if (static_cast<int>(x.size()) != s)
      throw DomainError("ragged observation matrix");
    for (int v : x)
      if (v < 1) throw DomainError("observation values must be >= 1");
  }
  for (int h : hs)
    if (h != -1 && h != 1) throw DomainError("public labels must be +-1");
  if (!g_is_binary()) {
    const auto alphabet = g_alphabet();
    for (std::size_t k = 0; k < alphabet.size(); ++k)
      if (alphabet[k] != static_cast<int>(k))
        throw DomainError("m-ary private labels must cover {0..m-1}");
    if (alphabet.size() < 2)
      throw DomainError("private hypothesis needs at least two classes");
  }
  for (const auto& [g, count] : g_counts())
    if (count < 1) throw DomainError("empty private class");  // unreachable
}

RiskConfig RiskConfig::defaults_for(int n) {
  RiskConfig cfg;
  cfg.lambda = 1.0 / static_cast<double>(n);
  cfg.lambda_n = 1.0 / std::sqrt(static_cast<double>(n));
  return cfg;
}

RiskForm RiskForm::for_h(const TrainingSet& ts, const RiskConfig& cfg) {
  RiskForm form;
  const int n = ts.size();
  form.reg = cfg.lambda;
  form.idx.resize(n);
  form.sign.resize(n);
  form.scale.assign(n, static_cast<double>(n));
  for (int i = 0; i < n; ++i) {
    form.idx[i] = i;
    form.sign[i] = static_cast<double>(ts.hs[i]);
  }
  return form;
}

RiskForm RiskForm::for_g(const TrainingSet& ts, const RiskConfig& cfg) {
  if (!ts.g_is_binary())
    throw DomainError("normalized G-risk requires binary private labels");
  RiskForm form;
  const int n = ts.size();
  form.reg = cfg.lambda_n;
  const auto counts = ts.g_counts();
  form.idx.resize(n);
  form.sign.resize(n);
  form.scale.resize(n);
  for (int i = 0; i < n; ++i) {
    form.idx[i] = i;
    form.sign[i] = static_cast<double>(ts.gs[i]);
    form.scale[i] = 2.0 * counts.at(ts.gs[i]);
  }
  return form;
}

RiskForm RiskForm::for_g_pair(const TrainingSet& ts, const RiskConfig& cfg,
                              int g) {
  if (g < 1) throw DomainError("pair class must be >= 1");
  RiskForm form;
  form.reg = cfg.lambda_n;
  const auto counts = ts.g_counts();
  if (counts.find(0) == counts.end() || counts.find(g) == counts.end())
    throw DomainError("pair classes missing from training set");
  for (int i = 0; i < ts.size(); ++i) {
    if (ts.gs[i] != 0 && ts.gs[i] != g) continue;
    form.idx.push_back(i);
    form.sign.push_back(ts.gs[i] == 0 ? -1.0 : 1.0);
    form.scale.push_back(2.0 * counts.at(ts.gs[i]));
  }
  return form;
}

RiskForm RiskForm::for_g_unnormalized(const TrainingSet& ts,
                                      const RiskConfig& cfg) {
  if (!ts.g_is_binary())
    throw DomainError("unnormalized G-risk requires binary private labels");
  RiskForm form;
  const int n = ts.size();
  form.reg = cfg.lambda;
  form.idx.resize(n);
  form.sign.resize(n);
  form.scale.assign(n, static_cast<double>(n));
  for (int i = 0; i < n; ++i) {
    form.idx[i] = i;
    form.sign[i] = static_cast<double>(ts.gs[i]);
  }
  return form;
}

Box dual_box(const RiskForm& form, const LossSpec& loss) {
  Box box;
  const int m = form.count();
  box.lo.resize(m);
  box.hi.resize(m);
  for (int a = 0; a < m; ++a) {
    box.lo[a] = loss.dual_lo() / form.scale[a];
    box.hi[a] = loss.dual_hi() / form.scale[a];
  }
  return box;
}

void check_dual_in_box(const RiskForm& form, const std::vector<double>& values,
                       const LossSpec& loss) {
  for (int a = 0; a < form.count(); ++a) {
    const double scaled = form.scale[a] * values[form.idx[a]];
    if (!loss.in_dual_domain(scaled))
      throw DomainError("dual entry " + std::to_string(form.idx[a]) +
                        " outside its box");
  }
}

GramCache::GramCache(const TrainingSet& ts, const RiskConfig& cfg,
                     PrivacyMapping q)
    : ts_(&ts), cfg_(cfg), q_(std::move(q)) {
  if (cfg_.kernel.kind == KernelKind::kCount) {
    dots_.resize(q_.s);
    for (int t = 0; t < q_.s; ++t) rebuild_dots(t);
  }
}

void GramCache::rebuild_dots(int t) {
  const int xc = q_.x_card;
  const int zc = q_.z_card;
  auto& dot = dots_[t];
  dot.assign(static_cast<std::size_t>(xc) * xc, 0.0);
  for (int x = 1; x <= xc; ++x)
    for (int x2 = x; x2 <= xc; ++x2) {
      const double* r1 = q_.row(t, x);
      const double* r2 = q_.row(t, x2);
      double v = 0.0;
      for (int z = 0; z < zc; ++z) v += r1[z] * r2[z];
      dot[static_cast<std::size_t>(x - 1) * xc + (x2 - 1)] = v;
      dot[static_cast<std::size_t>(x2 - 1) * xc + (x - 1)] = v;
    }
}

void GramCache::set_block(int t, const std::vector<double>& table) {
  q_.tables[t] = table;
  if (cfg_.kernel.kind == KernelKind::kCount) rebuild_dots(t);
  dirty_ = true;
}

const std::vector<double>& GramCache::full() {
  if (!dirty_) return full_;
  const int n = ts_->size();
  if (cfg_.kernel.kind == KernelKind::kCount) {
    full_.assign(static_cast<std::size_t>(n) * n, 0.0);
    const int xc = q_.x_card;
    for (int t = 0; t < q_.s; ++t) {
      const auto& dot = dots_[t];
      for (int i = 0; i < n; ++i) {
        const int xi = ts_->xs[i][t] - 1;
        for (int j = i; j < n; ++j)
          full_[static_cast<std::size_t>(i) * n + j] +=
              dot[static_cast<std::size_t>(xi) * xc + (ts_->xs[j][t] - 1)];
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j)
        full_[static_cast<std::size_t>(i) * n + j] =
            full_[static_cast<std::size_t>(j) * n + i];
  } else {
    full_ = gram_Q(ts_->xs, q_, cfg_.kernel);
  }
  dirty_ = false;
  return full_;
}

double dual_value_on_gram(const RiskForm& form,
                          const std::vector<double>& values,
                          const std::vector<double>& gram, int n,
                          const LossSpec& loss) {
  const int m = form.count();
  double separable = 0.0;
  for (int a = 0; a < m; ++a) {
    const double v = values[form.idx[a]];
    separable -= loss.phi_star_neg(form.scale[a] * v) / form.scale[a];
  }
  double quad = 0.0;
  for (int a = 0; a < m; ++a) {
    const double da = values[form.idx[a]] * form.sign[a];
    if (da == 0.0) continue;
    const double* row = gram.data() + static_cast<std::size_t>(form.idx[a]) * n;
    for (int b = 0; b < m; ++b)
      quad += da * values[form.idx[b]] * form.sign[b] * row[form.idx[b]];
  }
  return separable - quad / (2.0 * form.reg);
}

std::vector<double> dual_grad_on_gram(const RiskForm& form,
                                      const std::vector<double>& values,
                                      const std::vector<double>& gram, int n,
                                      const LossSpec& loss) {
  const int m = form.count();
  std::vector<double> grad(m, 0.0);
  for (int a = 0; a < m; ++a) {
    const double* row = gram.data() + static_cast<std::size_t>(form.idx[a]) * n;
    double mixed = 0.0;
    for (int b = 0; b < m; ++b)
      mixed += values[form.idx[b]] * form.sign[b] * row[form.idx[b]];
    grad[a] = -loss.phi_star_neg_deriv(form.scale[a] * values[form.idx[a]]) -
              form.sign[a] * mixed / form.reg;
  }
  return grad;
}

double primal_value_on_gram(const RiskForm& form,
                            const std::vector<double>& coeffs,
                            const std::vector<double>& gram, int n,
                            const LossSpec& loss) {
  const int m = form.count();
  double loss_total = 0.0;
  double norm_sq = 0.0;
  for (int a = 0; a < m; ++a) {
    const double* row = gram.data() + static_cast<std::size_t>(form.idx[a]) * n;
    double margin = 0.0;
    for (int b = 0; b < m; ++b)
      margin += coeffs[form.idx[b]] * form.sign[b] * row[form.idx[b]];
    loss_total += loss.phi(form.sign[a] * margin) / form.scale[a];
    norm_sq += coeffs[form.idx[a]] * form.sign[a] * margin;
  }
  return loss_total + form.reg / 2.0 * norm_sq;
}

namespace {

std::vector<double> gather(const RiskForm& form,
                           const std::vector<double>& full,
                           bool with_sign) {
  std::vector<double> out(form.count());
  for (int a = 0; a < form.count(); ++a)
    out[a] = full[form.idx[a]] * (with_sign ? form.sign[a] : 1.0);
  return out;
}

// Quadratic form sum_t |v_t|^2 of signed coefficients under the count
// kernel, optionally skipping one sensor.
double count_quad_form(const RiskForm& form, const std::vector<double>& d,
                       const PrivacyMapping& Q, const TrainingSet& ts,
                       int skip_t = -1) {
  double total = 0.0;
  for (int t = 0; t < Q.s; ++t) {
    if (t == skip_t) continue;
    const auto mass = detail::coeff_mass_by_x(form.idx, d, ts.xs, t, Q.x_card);
    total += detail::norm_sq(
        detail::mix_with_table(mass, Q.tables[t], Q.x_card, Q.z_card));
  }
  return total;
}

double dual_value_via_Q(const RiskForm& form, const std::vector<double>& values,
                        const PrivacyMapping& Q, const TrainingSet& ts,
                        const RiskConfig& cfg) {
  double separable = 0.0;
  for (int a = 0; a < form.count(); ++a)
    separable -= cfg.loss.phi_star_neg(form.scale[a] * values[form.idx[a]]) /
                 form.scale[a];
  double quad;
  if (cfg.kernel.kind == KernelKind::kCount) {
    quad = count_quad_form(form, gather(form, values, true), Q, ts);
  } else {
    quad = 0.0;
    for (int a = 0; a < form.count(); ++a)
      for (int b = 0; b < form.count(); ++b)
        quad += values[form.idx[a]] * form.sign[a] * values[form.idx[b]] *
                form.sign[b] *
                kernel_Q(ts.xs[form.idx[a]], ts.xs[form.idx[b]], Q, cfg.kernel);
  }
  return separable - quad / (2.0 * form.reg);
}

// Margins u_a = sum_b coeffs_b sign_b kappa_Q(x_b, x_a) over participants.
std::vector<double> margins_via_Q(const RiskForm& form,
                                  const std::vector<double>& d,
                                  const PrivacyMapping& Q,
                                  const TrainingSet& ts,
                                  const RiskConfig& cfg) {
  std::vector<double> u(form.count(), 0.0);
  if (cfg.kernel.kind == KernelKind::kCount) {
    for (int t = 0; t < Q.s; ++t) {
      const auto mass =
          detail::coeff_mass_by_x(form.idx, d, ts.xs, t, Q.x_card);
      const auto v =
          detail::mix_with_table(mass, Q.tables[t], Q.x_card, Q.z_card);
      detail::add_sensor_margins(v, form.idx, ts.xs, t, Q.tables[t], Q.z_card,
                                 &u);
    }
  } else {
    for (int a = 0; a < form.count(); ++a)
      for (int b = 0; b < form.count(); ++b)
        u[a] += d[b] *
                kernel_Q(ts.xs[form.idx[b]], ts.xs[form.idx[a]], Q, cfg.kernel);
  }
  return u;
}

double primal_value_via_Q(const RiskForm& form,
                          const std::vector<double>& coeffs,
                          const PrivacyMapping& Q, const TrainingSet& ts,
                          const RiskConfig& cfg) {
  const auto d = gather(form, coeffs, true);
  const auto u = margins_via_Q(form, d, Q, ts, cfg);
  double loss_total = 0.0;
  double norm_sq = 0.0;
  for (int a = 0; a < form.count(); ++a) {
    loss_total += cfg.loss.phi(form.sign[a] * u[a]) / form.scale[a];
    norm_sq += d[a] * u[a];
  }
  return loss_total + form.reg / 2.0 * norm_sq;
}

void require_count_kernel(const RiskConfig& cfg, const char* op) {
  if (cfg.kernel.kind != KernelKind::kCount)
    throw UnsupportedKernel(std::string(op) + " requires the count kernel");
}

}  // namespace

double dual_risk_G(const DualVector& beta, const PrivacyMapping& Q,
                   const TrainingSet& ts, const RiskConfig& cfg) {
  const auto form = RiskForm::for_g(ts, cfg);
  check_dual_in_box(form, beta.values, cfg.loss);
  return dual_value_via_Q(form, beta.values, Q, ts, cfg);
}

double dual_risk_H(const DualVector& alpha, const PrivacyMapping& Q,
                   const TrainingSet& ts, const RiskConfig& cfg) {
  const auto form = RiskForm::for_h(ts, cfg);
  check_dual_in_box(form, alpha.values, cfg.loss);
  return dual_value_via_Q(form, alpha.values, Q, ts, cfg);
}

double primal_risk_H(const std::vector<double>& w_coeffs,
                     const PrivacyMapping& Q, const TrainingSet& ts,
                     const RiskConfig& cfg) {
  return primal_value_via_Q(RiskForm::for_h(ts, cfg), w_coeffs, Q, ts, cfg);
}

double primal_risk_G(const std::vector<double>& w_coeffs,
                     const PrivacyMapping& Q, const TrainingSet& ts,
                     const RiskConfig& cfg) {
  return primal_value_via_Q(RiskForm::for_g(ts, cfg), w_coeffs, Q, ts, cfg);
}

std::vector<double> grad_dual(const DualVector& vec, const PrivacyMapping& Q,
                              const TrainingSet& ts, const RiskConfig& cfg) {
  const auto form = vec.role == DualRole::kAlphaForH
                        ? RiskForm::for_h(ts, cfg)
                        : RiskForm::for_g(ts, cfg);
  check_dual_in_box(form, vec.values, cfg.loss);
  // Interior requirement for duals with unbounded boundary slope.
  if (cfg.loss.dual_slope_unbounded_at_boundary()) {
    for (int a = 0; a < form.count(); ++a) {
      const double scaled = form.scale[a] * vec.values[form.idx[a]];
      if (scaled <= cfg.loss.dual_lo() || scaled >= cfg.loss.dual_hi())
        throw DomainError("dual slope unbounded at box boundary");
    }
  }
  GramCache cache(ts, cfg, Q);
  return dual_grad_on_gram(form, vec.values, cache.full(), ts.size(), cfg.loss);
}

namespace {

// d(quad form)/dQ^t(z|x) = 2 * mass[x] * v[z] for the signed coefficients.
std::vector<double> quad_block_grad(const RiskForm& form,
                                    const std::vector<double>& d, int t,
                                    const PrivacyMapping& Q,
                                    const TrainingSet& ts) {
  const auto mass = detail::coeff_mass_by_x(form.idx, d, ts.xs, t, Q.x_card);
  const auto v = detail::mix_with_table(mass, Q.tables[t], Q.x_card, Q.z_card);
  std::vector<double> grad(static_cast<std::size_t>(Q.x_card) * Q.z_card);
  for (int x = 0; x < Q.x_card; ++x)
    for (int z = 0; z < Q.z_card; ++z)
      grad[static_cast<std::size_t>(x) * Q.z_card + z] = 2.0 * mass[x] * v[z];
  return grad;
}

}  // namespace

std::vector<double> grad_Q_sensor(int t, const DualVector& beta,
                                  const PrivacyMapping& Q,
                                  const TrainingSet& ts,
                                  const RiskConfig& cfg) {
  require_count_kernel(cfg, "grad_Q_sensor");
  const auto form = RiskForm::for_g(ts, cfg);
  check_dual_in_box(form, beta.values, cfg.loss);
  auto grad = quad_block_grad(form, gather(form, beta.values, true), t, Q, ts);
  for (double& e : grad) e *= -1.0 / (2.0 * form.reg);
  return grad;
}

double npo_objective(const std::vector<double>& alpha,
                     const std::vector<const std::vector<double>*>& betas,
                     const std::vector<RiskForm>& beta_forms, double theta,
                     double mu, const PrivacyMapping& Q, const TrainingSet& ts,
                     const RiskConfig& cfg) {
  const auto h_form = RiskForm::for_h(ts, cfg);
  double value = primal_value_via_Q(h_form, alpha, Q, ts, cfg);
  if (std::isinf(theta) && theta < 0.0) return value;  // barrier disabled
  for (std::size_t k = 0; k < beta_forms.size(); ++k) {
    const double slack =
        dual_value_via_Q(beta_forms[k], *betas[k], Q, ts, cfg) - theta;
    if (slack <= 0.0)
      throw BarrierViolation("constraint " + std::to_string(k) +
                             " slack nonpositive in barrier objective");
    value -= std::log(slack) / mu;
  }
  return value;
}

std::vector<double> grad_Q_sensor_npo(
    int t, const std::vector<double>& alpha,
    const std::vector<const std::vector<double>*>& betas,
    const std::vector<RiskForm>& beta_forms, double theta, double mu,
    const PrivacyMapping& Q, const TrainingSet& ts, const RiskConfig& cfg) {
  require_count_kernel(cfg, "grad_Q_sensor_npo");
  const int xc = Q.x_card;
  const int zc = Q.z_card;
  const auto h_form = RiskForm::for_h(ts, cfg);
  const auto d = gather(h_form, alpha, true);
  const auto u = margins_via_Q(h_form, d, Q, ts, cfg);

  // Loss + norm part. The representer coefficients ride on Phi_Q, so the
  // margins are quadratic in the block: u_a = uOther_a + <w(q), row(x_a^t)>
  // with w(q) itself a mixture of the block rows.
  const auto mass = detail::coeff_mass_by_x(h_form.idx, d, ts.xs, t, xc);
  const auto w = detail::mix_with_table(mass, Q.tables[t], xc, zc);
  std::vector<double> a_coef(h_form.count());
  for (int a = 0; a < h_form.count(); ++a)
    a_coef[a] = cfg.loss.phi_deriv(h_form.sign[a] * u[a]) * h_form.sign[a] /
                h_form.scale[a];
  const auto a_mass = detail::coeff_mass_by_x(h_form.idx, a_coef, ts.xs, t, xc);
  const auto r = detail::mix_with_table(a_mass, Q.tables[t], xc, zc);

  std::vector<double> grad(static_cast<std::size_t>(xc) * zc, 0.0);
  for (int x = 0; x < xc; ++x)
    for (int z = 0; z < zc; ++z)
      grad[static_cast<std::size_t>(x) * zc + z] =
          w[z] * a_mass[x] + mass[x] * r[z] +
          cfg.lambda * mass[x] * w[z];

  if (std::isinf(theta) && theta < 0.0) return grad;

  // Barrier terms.
  for (std::size_t k = 0; k < beta_forms.size(); ++k) {
    const auto& form = beta_forms[k];
    const double slack =
        dual_value_via_Q(form, *betas[k], Q, ts, cfg) - theta;
    if (slack <= 0.0)
      throw BarrierViolation("constraint " + std::to_string(k) +
                             " slack nonpositive in barrier gradient");
    const auto db = gather(form, *betas[k], true);
    const auto bmass = detail::coeff_mass_by_x(form.idx, db, ts.xs, t, xc);
    const auto vb = detail::mix_with_table(bmass, Q.tables[t], xc, zc);
    const double factor = 1.0 / (mu * form.reg * slack);
    for (int x = 0; x < xc; ++x)
      for (int z = 0; z < zc; ++z)
        grad[static_cast<std::size_t>(x) * zc + z] +=
            factor * bmass[x] * vb[z];
  }
  return grad;
}

std::vector<double> grad_Q_sensor_npo(int t, const DualVector& alpha,
                                      const DualVector& beta, double theta,
                                      double mu, const PrivacyMapping& Q,
                                      const TrainingSet& ts,
                                      const RiskConfig& cfg) {
  std::vector<RiskForm> forms{RiskForm::for_g(ts, cfg)};
  std::vector<const std::vector<double>*> betas{&beta.values};
  return grad_Q_sensor_npo(t, alpha.values, betas, forms, theta, mu, Q, ts,
                           cfg);
}

std::vector<double> anchored_margins(
    const std::vector<std::vector<int>>& anchors,
    const std::vector<double>& coeffs,
    const std::vector<std::vector<int>>& eval_xs, const PrivacyMapping& Q,
    const KernelSpec& kernel) {
  std::vector<double> out(eval_xs.size(), 0.0);
  for (std::size_t i = 0; i < eval_xs.size(); ++i)
    for (std::size_t k = 0; k < anchors.size(); ++k)
      out[i] += coeffs[k] * kernel_Q(anchors[k], eval_xs[i], Q, kernel);
  return out;
}

double anchored_norm_sq(const std::vector<std::vector<int>>& anchors,
                        const std::vector<double>& coeffs,
                        const PrivacyMapping& Q, const KernelSpec& kernel) {
  double total = 0.0;
  for (std::size_t k = 0; k < anchors.size(); ++k)
    for (std::size_t l = 0; l < anchors.size(); ++l)
      total += coeffs[k] * coeffs[l] * kernel_Q(anchors[k], anchors[l], Q, kernel);
  return total;
}

}  // namespace privmap
