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
#include "privmap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "count_blocks.hpp"
#include "privmap/errors.hpp"

namespace privmap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInteriorMargin = 1e-9;  // clamp inside open dual domains
constexpr int kMaxBacktracks = 60;

double rel_change(double now, double before) {
  return std::abs(now - before) / std::max(std::abs(before), 1e-12);
}

struct BoxLimits {
  std::vector<double> lo, hi;  // participant space
};

BoxLimits effective_box(const RiskForm& form, const LossSpec& loss) {
  double dlo = loss.dual_lo();
  double dhi = loss.dual_hi();
  if (loss.dual_slope_unbounded_at_boundary()) {
    if (std::isfinite(dlo)) dlo += kInteriorMargin;
    if (std::isfinite(dhi)) dhi -= kInteriorMargin;
  }
  BoxLimits box;
  const int m = form.count();
  box.lo.resize(m);
  box.hi.resize(m);
  for (int a = 0; a < m; ++a) {
    box.lo[a] = dlo / form.scale[a];
    box.hi[a] = dhi / form.scale[a];
  }
  return box;
}

// Mid-box start in the scaled dual domain; unbounded domains use the
// separable stationary point of -phi*(-x*).
std::vector<double> midbox_start(const RiskForm& form, const LossSpec& loss,
                                 int n) {
  double x0;
  if (std::isfinite(loss.dual_lo()) && std::isfinite(loss.dual_hi()))
    x0 = 0.5 * (loss.dual_lo() + loss.dual_hi());
  else if (loss.kind() == LossKind::kExponential)
    x0 = 1.0;
  else
    x0 = 2.0;  // quadratic
  std::vector<double> values(n, 0.0);
  for (int a = 0; a < form.count(); ++a)
    values[form.idx[a]] = x0 / form.scale[a];
  return values;
}

struct AscentResult {
  std::vector<double> values;
  double objective;
};

// Projected-gradient ascent of the concave dual over the per-entry boxes,
// with Armijo backtracking. Never returns a worse objective than the
// (clamped) start.
AscentResult ascend_dual(const RiskForm& form, const LossSpec& loss,
                         const std::vector<double>& gram, int n,
                         std::vector<double> values,
                         const InnerConfig& inner) {
  const auto box = effective_box(form, loss);
  const int m = form.count();
  for (int a = 0; a < m; ++a)
    values[form.idx[a]] =
        std::clamp(values[form.idx[a]], box.lo[a], box.hi[a]);
  double f = dual_value_on_gram(form, values, gram, n, loss);
  double step_init = inner.step0;

  for (int iter = 0; iter < inner.max_iters; ++iter) {
    const auto grad = dual_grad_on_gram(form, values, gram, n, loss);
    double step = step_init;
    std::vector<double> cand = values;
    std::vector<double> best;
    double best_f = f;
    bool accepted = false;
    double accepted_f = f;
    bool blocked = false;

    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      double gap = 0.0;
      for (int a = 0; a < m; ++a) {
        const double nv = std::clamp(values[form.idx[a]] + step * grad[a],
                                     box.lo[a], box.hi[a]);
        gap += grad[a] * (nv - values[form.idx[a]]);
        cand[form.idx[a]] = nv;
      }
      if (gap <= 0.0) {
        blocked = true;  // stationary for box constraints
        break;
      }
      const double fc = dual_value_on_gram(form, cand, gram, n, loss);
      if (fc >= f + inner.armijo_slope * gap) {
        accepted = true;
        accepted_f = fc;
        break;
      }
      if (fc > best_f) {
        best_f = fc;
        best = cand;
      }
      step *= inner.armijo_shrink;
    }

    if (blocked) break;
    if (!accepted) {
      if (best.empty()) break;  // no improvement at any step
      cand = best;
      accepted_f = best_f;
    }
    const double change = rel_change(accepted_f, f);
    values = cand;
    f = accepted_f;
    step_init = std::clamp(step * 2.0, 1e-10, inner.step0);
    if (change <= inner.tol) break;
  }
  return {std::move(values), f};
}

}  // namespace

void SolverConfig::validate(int z_card, int x_card) const {
  if (delta1 < 0.0 || delta2 < 0.0)
    throw ConfigError("delta1 and delta2 must be nonnegative");
  if (z_card < 2) throw ConfigError("z_card must be at least 2");
  if (delta2 >= 1.0 / z_card - delta2)
    throw ConfigError("delta2 leaves no feasible band margin for this |Z|");
  if (x_card > 0 && delta1 > static_cast<double>(x_card) / z_card)
    throw ConfigError("delta1 exceeds the achievable column mass");
  if (mu <= 0.0) throw ConfigError("mu must be positive");
  if (p_ratio <= 0.0 || p_ratio >= 1.0)
    throw ConfigError("p_ratio must lie in (0,1)");
  if (stop_tol <= 0.0) throw ConfigError("stop_tol must be positive");
  if (max_outer < 1) throw ConfigError("max_outer must be at least 1");
  if (inner.max_iters < 1) throw ConfigError("inner.max_iters must be >= 1");
}

std::vector<double> project_to_simplex(std::vector<double> v) {
  std::vector<double> u(v);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double tau = 0.0;
  int rho = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumsum += u[k];
    const double candidate = (1.0 - cumsum) / static_cast<double>(k + 1);
    if (u[k] + candidate > 0.0) {
      rho = static_cast<int>(k + 1);
      tau = candidate;
    }
  }
  (void)rho;
  for (double& e : v) e = std::max(e + tau, 0.0);
  return v;
}

bool project_row_qprime(std::vector<double>& row, double delta2,
                        int max_passes) {
  row = project_to_simplex(std::move(row));
  if (delta2 <= 0.0) return true;
  const int zc = static_cast<int>(row.size());
  const double center = 1.0 / zc;
  for (int pass = 0; pass < max_passes; ++pass) {
    bool pushed = false;
    for (double& e : row) {
      if (std::abs(e - center) < delta2 - 1e-15) {
        e = e >= center ? center + delta2 : center - delta2;
        pushed = true;
      }
    }
    if (!pushed) {
      double sum = 0.0;
      for (double e : row) {
        if (e < -1e-15) return false;
        sum += e;
      }
      return std::abs(sum - 1.0) <= 1e-9;
    }
    double sum = std::accumulate(row.begin(), row.end(), 0.0);
    auto largest = std::max_element(row.begin(), row.end());
    *largest += 1.0 - sum;
    if (*largest < 0.0) return false;
  }
  return false;
}

namespace {

bool columns_feasible(const std::vector<double>& table, int x_card, int z_card,
                      double delta1) {
  for (int z = 0; z < z_card; ++z) {
    double col = 0.0;
    for (int x = 0; x < x_card; ++x)
      col += table[static_cast<std::size_t>(x) * z_card + z];
    if (col < delta1 - 1e-12) return false;
  }
  return true;
}

}  // namespace

PrivacyMapping random_qprime_mapping(int s, int x_card, int z_card,
                                     const SolverConfig& scfg, Rng& rng) {
  PrivacyMapping q;
  q.s = s;
  q.x_card = x_card;
  q.z_card = z_card;
  q.tables.resize(s);
  for (int t = 0; t < s; ++t) {
    bool ok = false;
    for (int attempt = 0; attempt < 200 && !ok; ++attempt) {
      std::vector<double> table(static_cast<std::size_t>(x_card) * z_card);
      ok = true;
      for (int x = 0; x < x_card && ok; ++x) {
        auto row = rng.simplex(z_card);
        if (!project_row_qprime(row, scfg.delta2)) {
          ok = false;
          break;
        }
        std::copy(row.begin(), row.end(),
                  table.begin() + static_cast<std::size_t>(x) * z_card);
      }
      if (ok && !columns_feasible(table, x_card, z_card, scfg.delta1))
        ok = false;
      if (ok) q.tables[t] = std::move(table);
    }
    if (!ok)
      throw InfeasibleProjection("could not draw a feasible table for sensor " +
                                 std::to_string(t));
  }
  return q;
}

namespace {

// ---- Algorithm 1 block step -------------------------------------------

// Dual objective restricted to block t; constant terms cached.
struct Alg1Block {
  std::vector<double> mass;  // signed coefficient mass per x value
  double sep_const = 0.0;
  double quad_other = 0.0;
  double reg = 0.0;
  int xc = 0, zc = 0;

  double eval(const std::vector<double>& table) const {
    const auto v = detail::mix_with_table(mass, table, xc, zc);
    return sep_const - (quad_other + detail::norm_sq(v)) / (2.0 * reg);
  }
  std::vector<double> grad(const std::vector<double>& table) const {
    const auto v = detail::mix_with_table(mass, table, xc, zc);
    std::vector<double> g(static_cast<std::size_t>(xc) * zc);
    for (int x = 0; x < xc; ++x)
      for (int z = 0; z < zc; ++z)
        g[static_cast<std::size_t>(x) * zc + z] = -mass[x] * v[z] / reg;
    return g;
  }
};

Alg1Block make_alg1_block(int t, const RiskForm& form,
                          const std::vector<double>& values,
                          const PrivacyMapping& Q, const TrainingSet& ts,
                          const LossSpec& loss) {
  Alg1Block blk;
  blk.xc = Q.x_card;
  blk.zc = Q.z_card;
  blk.reg = form.reg;
  std::vector<double> d(form.count());
  for (int a = 0; a < form.count(); ++a) {
    d[a] = values[form.idx[a]] * form.sign[a];
    blk.sep_const -=
        loss.phi_star_neg(form.scale[a] * values[form.idx[a]]) / form.scale[a];
  }
  blk.mass = detail::coeff_mass_by_x(form.idx, d, ts.xs, t, Q.x_card);
  blk.quad_other = detail::quad_form_except(form.idx, d, ts.xs, Q.tables,
                                            Q.x_card, Q.z_card, t);
  return blk;
}

// Ascends the block objective over Q'. Candidates that cannot be repaired
// into the feasible set are rejected; the returned table never has a lower
// objective than the input.
std::vector<double> ascend_block_alg1(const Alg1Block& blk,
                                      std::vector<double> table,
                                      const SolverConfig& scfg) {
  const int xc = blk.xc, zc = blk.zc;
  double f = blk.eval(table);
  double step_init = scfg.inner.step0;
  for (int iter = 0; iter < scfg.inner.max_iters; ++iter) {
    const auto grad = blk.grad(table);
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    if (gmax == 0.0) break;

    double step = step_init;
    std::vector<double> best;
    double best_f = f;
    bool accepted = false;
    std::vector<double> cand(table.size());
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      bool feasible = true;
      double gap = 0.0;
      for (int x = 0; x < xc && feasible; ++x) {
        std::vector<double> row(zc);
        for (int z = 0; z < zc; ++z)
          row[z] = table[static_cast<std::size_t>(x) * zc + z] +
                   step * grad[static_cast<std::size_t>(x) * zc + z];
        if (!project_row_qprime(row, scfg.delta2)) {
          feasible = false;
          break;
        }
        for (int z = 0; z < zc; ++z) {
          const std::size_t e = static_cast<std::size_t>(x) * zc + z;
          cand[e] = row[z];
          gap += grad[e] * (cand[e] - table[e]);
        }
      }
      if (feasible && !columns_feasible(cand, xc, zc, scfg.delta1))
        feasible = false;
      if (feasible) {
        const double fc = blk.eval(cand);
        if (gap > 0.0 && fc >= f + scfg.inner.armijo_slope * gap) {
          accepted = true;
          best = cand;
          best_f = fc;
          break;
        }
        if (fc > best_f) {
          best_f = fc;
          best = cand;
        }
      }
      step *= scfg.inner.armijo_shrink;
    }
    if (best.empty()) break;  // nothing improved: keep current block
    const double change = rel_change(best_f, f);
    table = std::move(best);
    f = best_f;
    if (accepted) step_init = std::clamp(step * 2.0, 1e-10, scfg.inner.step0);
    if (change <= scfg.inner.tol) break;
  }
  return table;
}

// ---- Algorithm 2 block step -------------------------------------------

struct Alg2Constraint {
  std::vector<double> mass;
  double sep_const = 0.0;
  double quad_other = 0.0;
  double reg = 0.0;
};

// Barrier objective restricted to block t. The representer coefficients
// ride on Phi_Q, so the margins are quadratic in the block entries.
struct Alg2Block {
  const RiskForm* h_form = nullptr;
  const TrainingSet* ts = nullptr;
  const LossSpec* loss = nullptr;
  std::vector<double> u_other;  // margins from the other sensors
  std::vector<double> mass_h;   // signed alpha mass per x value
  double norm_other = 0.0;
  double reg_h = 0.0;
  std::vector<Alg2Constraint> cons;
  double theta = 0.0, mu = 0.0;
  bool barrier = true;
  int t = 0, xc = 0, zc = 0;

  double eval(const std::vector<double>& table) const {
    const auto w = detail::mix_with_table(mass_h, table, xc, zc);
    auto u = u_other;
    detail::add_sensor_margins(w, h_form->idx, ts->xs, t, table, zc, &u);
    double value = 0.0;
    for (int a = 0; a < h_form->count(); ++a)
      value += loss->phi(h_form->sign[a] * u[a]) / h_form->scale[a];
    value += reg_h / 2.0 * (norm_other + detail::norm_sq(w));
    if (!barrier) return value;
    for (const auto& con : cons) {
      const auto v = detail::mix_with_table(con.mass, table, xc, zc);
      const double slack = con.sep_const -
                           (con.quad_other + detail::norm_sq(v)) /
                               (2.0 * con.reg) -
                           theta;
      if (slack <= 0.0) return kInf;
      value -= std::log(slack) / mu;
    }
    return value;
  }

  std::vector<double> grad(const std::vector<double>& table) const {
    const auto w = detail::mix_with_table(mass_h, table, xc, zc);
    auto u = u_other;
    detail::add_sensor_margins(w, h_form->idx, ts->xs, t, table, zc, &u);
    std::vector<double> a_coef(h_form->count());
    for (int a = 0; a < h_form->count(); ++a)
      a_coef[a] = loss->phi_deriv(h_form->sign[a] * u[a]) * h_form->sign[a] /
                  h_form->scale[a];
    const auto a_mass =
        detail::coeff_mass_by_x(h_form->idx, a_coef, ts->xs, t, xc);
    const auto r = detail::mix_with_table(a_mass, table, xc, zc);
    std::vector<double> g(static_cast<std::size_t>(xc) * zc);
    for (int x = 0; x < xc; ++x)
      for (int z = 0; z < zc; ++z)
        g[static_cast<std::size_t>(x) * zc + z] =
            a_mass[x] * w[z] + mass_h[x] * r[z] + reg_h * mass_h[x] * w[z];
    if (!barrier) return g;
    for (const auto& con : cons) {
      const auto v = detail::mix_with_table(con.mass, table, xc, zc);
      const double slack = con.sep_const -
                           (con.quad_other + detail::norm_sq(v)) /
                               (2.0 * con.reg) -
                           theta;
      if (slack <= 0.0)
        throw BarrierViolation("slack nonpositive inside block gradient");
      const double factor = 1.0 / (mu * con.reg * slack);
      for (int x = 0; x < xc; ++x)
        for (int z = 0; z < zc; ++z)
          g[static_cast<std::size_t>(x) * zc + z] += factor * con.mass[x] * v[z];
    }
    return g;
  }
};

Alg2Block make_alg2_block(int t, const RiskForm& h_form,
                          const std::vector<double>& alpha,
                          const std::vector<RiskForm>& beta_forms,
                          const std::vector<const std::vector<double>*>& betas,
                          double theta, double mu, const PrivacyMapping& Q,
                          const TrainingSet& ts, const LossSpec& loss) {
  Alg2Block blk;
  blk.h_form = &h_form;
  blk.ts = &ts;
  blk.loss = &loss;
  blk.t = t;
  blk.xc = Q.x_card;
  blk.zc = Q.z_card;
  blk.reg_h = h_form.reg;
  blk.theta = theta;
  blk.mu = mu;
  blk.barrier = !(std::isinf(theta) && theta < 0.0);

  std::vector<double> d(h_form.count());
  for (int a = 0; a < h_form.count(); ++a)
    d[a] = alpha[h_form.idx[a]] * h_form.sign[a];
  blk.mass_h = detail::coeff_mass_by_x(h_form.idx, d, ts.xs, t, Q.x_card);
  blk.u_other = detail::margins_except(h_form.idx, d, ts.xs, Q.tables,
                                       Q.x_card, Q.z_card, t);
  blk.norm_other = detail::quad_form_except(h_form.idx, d, ts.xs, Q.tables,
                                            Q.x_card, Q.z_card, t);
  if (blk.barrier) {
    for (std::size_t k = 0; k < beta_forms.size(); ++k) {
      const auto& form = beta_forms[k];
      Alg2Constraint con;
      con.reg = form.reg;
      std::vector<double> db(form.count());
      for (int a = 0; a < form.count(); ++a) {
        db[a] = (*betas[k])[form.idx[a]] * form.sign[a];
        con.sep_const -=
            loss.phi_star_neg(form.scale[a] * (*betas[k])[form.idx[a]]) /
            form.scale[a];
      }
      con.mass = detail::coeff_mass_by_x(form.idx, db, ts.xs, t, Q.x_card);
      con.quad_other = detail::quad_form_except(form.idx, db, ts.xs, Q.tables,
                                                Q.x_card, Q.z_card, t);
      blk.cons.push_back(std::move(con));
    }
  }
  return blk;
}

// Descends the barrier objective over simplex rows; rejects candidates that
// lose feasibility. Never returns a worse objective.
std::vector<double> descend_block_alg2(const Alg2Block& blk,
                                       std::vector<double> table,
                                       const SolverConfig& scfg) {
  const int xc = blk.xc, zc = blk.zc;
  double f = blk.eval(table);
  if (std::isinf(f))
    throw BarrierViolation("block entered with nonpositive slack");
  double step_init = scfg.inner.step0;
  for (int iter = 0; iter < scfg.inner.max_iters; ++iter) {
    const auto grad = blk.grad(table);
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    if (gmax == 0.0) break;

    double step = step_init;
    std::vector<double> best;
    double best_f = f;
    bool accepted = false;
    std::vector<double> cand(table.size());
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      double gap = 0.0;
      for (int x = 0; x < xc; ++x) {
        std::vector<double> row(zc);
        for (int z = 0; z < zc; ++z)
          row[z] = table[static_cast<std::size_t>(x) * zc + z] -
                   step * grad[static_cast<std::size_t>(x) * zc + z];
        row = project_to_simplex(std::move(row));
        for (int z = 0; z < zc; ++z) {
          const std::size_t e = static_cast<std::size_t>(x) * zc + z;
          cand[e] = row[z];
          gap += -grad[e] * (cand[e] - table[e]);
        }
      }
      if (gap <= 0.0) break;  // projection blocked: stationary
      const double fc = blk.eval(cand);
      if (fc <= f - scfg.inner.armijo_slope * gap) {
        accepted = true;
        best = cand;
        best_f = fc;
        break;
      }
      if (fc < best_f) {
        best_f = fc;
        best = cand;
      }
      step *= scfg.inner.armijo_shrink;
    }
    if (best.empty()) break;
    const double change = rel_change(best_f, f);
    table = std::move(best);
    f = best_f;
    if (accepted) step_init = std::clamp(step * 2.0, 1e-10, scfg.inner.step0);
    if (change <= scfg.inner.tol) break;
  }
  return table;
}

void require_count_kernel(const RiskConfig& cfg, const char* what) {
  if (cfg.kernel.kind != KernelKind::kCount)
    throw UnsupportedKernel(std::string(what) + " requires the count kernel");
}

// ---- Stage 1 -----------------------------------------------------------

ThetaStarResult maximize_constraint_dual(const TrainingSet& ts,
                                         const RiskConfig& cfg,
                                         const SolverConfig& scfg,
                                         const RiskForm& form,
                                         std::uint64_t seed, int z_card) {
  require_count_kernel(cfg, "find_theta_star");
  ts.validate();
  scfg.validate(z_card, ts.x_card());
  const int n = ts.size();
  Rng rng(seed);
  GramCache cache(
      ts, cfg,
      random_qprime_mapping(ts.sensor_count(), ts.x_card(), z_card, scfg, rng));
  auto values = midbox_start(form, cfg.loss, n);

  ThetaStarResult out;
  double f = dual_value_on_gram(form, values, cache.full(), n, cfg.loss);
  out.trace.push_back({0, f, 0.0});
  for (int k = 1; k <= scfg.max_outer; ++k) {
    auto asc = ascend_dual(form, cfg.loss, cache.full(), n, values, scfg.inner);
    values = std::move(asc.values);
    for (int t = 0; t < cache.mapping().s; ++t) {
      const auto blk =
          make_alg1_block(t, form, values, cache.mapping(), ts, cfg.loss);
      cache.set_block(t,
                      ascend_block_alg1(blk, cache.mapping().tables[t], scfg));
    }
    const double f_new =
        dual_value_on_gram(form, values, cache.full(), n, cfg.loss);
    out.trace.push_back({k, f_new, 0.0});
    const double change = rel_change(f_new, f);
    f = f_new;
    if (change <= scfg.stop_tol) {
      out.converged = true;
      break;
    }
  }
  out.theta_star = f;
  out.beta = DualVector{values, DualRole::kBetaForG};
  out.Q = cache.mapping();
  return out;
}

// ---- Stage 2 -----------------------------------------------------------

SolveResult run_barrier_descent(const TrainingSet& ts, const RiskConfig& cfg,
                                const SolverConfig& scfg, double theta,
                                const std::vector<RiskForm>& beta_forms,
                                std::vector<std::vector<double>> betas,
                                const PrivacyMapping& Q0) {
  require_count_kernel(cfg, "optimize_npo");
  ts.validate();
  scfg.validate(Q0.z_card, ts.x_card());
  Q0.validate(1e-9);
  const int n = ts.size();
  const bool barrier = !(std::isinf(theta) && theta < 0.0);
  const auto h_form = RiskForm::for_h(ts, cfg);

  GramCache cache(ts, cfg, Q0);
  // Clamp warm duals into their boxes, then require strict entry slack.
  for (std::size_t k = 0; k < beta_forms.size(); ++k) {
    const auto box = effective_box(beta_forms[k], cfg.loss);
    for (int a = 0; a < beta_forms[k].count(); ++a) {
      double& v = betas[k][beta_forms[k].idx[a]];
      v = std::clamp(v, box.lo[a], box.hi[a]);
    }
  }
  std::vector<const std::vector<double>*> beta_ptrs;
  for (auto& b : betas) beta_ptrs.push_back(&b);
  if (barrier) {
    for (std::size_t k = 0; k < beta_forms.size(); ++k) {
      const double value = dual_value_on_gram(beta_forms[k], betas[k],
                                              cache.full(), n, cfg.loss);
      if (value <= theta)
        throw BarrierViolation(
            "warm start infeasible: constraint dual " + std::to_string(value) +
            " <= theta " + std::to_string(theta));
    }
  }

  auto alpha = midbox_start(h_form, cfg.loss, n);
  SolveResult out;
  out.theta = theta;

  double f0 = npo_objective(alpha, beta_ptrs, beta_forms, theta, scfg.mu,
                            cache.mapping(), ts, cfg);
  double slack_min = 0.0;
  if (barrier) {
    slack_min = kInf;
    for (std::size_t k = 0; k < beta_forms.size(); ++k)
      slack_min = std::min(
          slack_min, dual_value_on_gram(beta_forms[k], betas[k], cache.full(),
                                        n, cfg.loss) -
                         theta);
  }
  out.trace.push_back({0, f0, slack_min});

  for (int k = 1; k <= scfg.max_outer; ++k) {
    // w_H block through its dual; kept only if the primal improves.
    auto asc =
        ascend_dual(h_form, cfg.loss, cache.full(), n, alpha, scfg.inner);
    if (primal_value_on_gram(h_form, asc.values, cache.full(), n, cfg.loss) <=
        primal_value_on_gram(h_form, alpha, cache.full(), n, cfg.loss))
      alpha = std::move(asc.values);

    // Constraint duals: ascent can only grow the slack.
    if (barrier)
      for (std::size_t c = 0; c < beta_forms.size(); ++c)
        betas[c] = ascend_dual(beta_forms[c], cfg.loss, cache.full(), n,
                               betas[c], scfg.inner)
                       .values;

    for (int t = 0; t < cache.mapping().s; ++t) {
      const auto blk =
          make_alg2_block(t, h_form, alpha, beta_forms, beta_ptrs, theta,
                          scfg.mu, cache.mapping(), ts, cfg.loss);
      cache.set_block(
          t, descend_block_alg2(blk, cache.mapping().tables[t], scfg));
    }

    const double f0_new = npo_objective(alpha, beta_ptrs, beta_forms, theta,
                                        scfg.mu, cache.mapping(), ts, cfg);
    slack_min = 0.0;
    if (barrier) {
      slack_min = kInf;
      for (std::size_t c = 0; c < beta_forms.size(); ++c)
        slack_min = std::min(
            slack_min, dual_value_on_gram(beta_forms[c], betas[c],
                                          cache.full(), n, cfg.loss) -
                           theta);
    }
    out.trace.push_back({k, f0_new, slack_min});
    const double change = rel_change(f0_new, f0);
    f0 = f0_new;
    if (change <= scfg.stop_tol) {
      out.converged = true;
      break;
    }
  }

  out.alpha = DualVector{std::move(alpha), DualRole::kAlphaForH};
  for (auto& b : betas)
    out.betas.push_back(DualVector{std::move(b), DualRole::kBetaForG});
  out.Q = cache.mapping();
  return out;
}

}  // namespace

DualVector maximize_beta(const PrivacyMapping& Q, const TrainingSet& ts,
                         const RiskConfig& cfg, const SolverConfig& scfg,
                         std::optional<DualVector> warm) {
  const auto form = RiskForm::for_g(ts, cfg);
  GramCache cache(ts, cfg, Q);
  auto start = warm.has_value() ? std::move(warm->values)
                                : midbox_start(form, cfg.loss, ts.size());
  auto res = ascend_dual(form, cfg.loss, cache.full(), ts.size(),
                         std::move(start), scfg.inner);
  return DualVector{std::move(res.values), DualRole::kBetaForG};
}

DualVector maximize_alpha(const PrivacyMapping& Q, const TrainingSet& ts,
                          const RiskConfig& cfg, const SolverConfig& scfg,
                          std::optional<DualVector> warm) {
  const auto form = RiskForm::for_h(ts, cfg);
  GramCache cache(ts, cfg, Q);
  auto start = warm.has_value() ? std::move(warm->values)
                                : midbox_start(form, cfg.loss, ts.size());
  auto res = ascend_dual(form, cfg.loss, cache.full(), ts.size(),
                         std::move(start), scfg.inner);
  return DualVector{std::move(res.values), DualRole::kAlphaForH};
}

PrivacyMapping update_Q_block_alg1(int t, const DualVector& beta,
                                   const PrivacyMapping& Q,
                                   const TrainingSet& ts,
                                   const RiskConfig& cfg,
                                   const SolverConfig& scfg) {
  require_count_kernel(cfg, "update_Q_block_alg1");
  const auto form = RiskForm::for_g(ts, cfg);
  check_dual_in_box(form, beta.values, cfg.loss);
  const auto blk = make_alg1_block(t, form, beta.values, Q, ts, cfg.loss);
  PrivacyMapping out = Q;
  out.tables[t] = ascend_block_alg1(blk, Q.tables[t], scfg);
  return out;
}

PrivacyMapping update_Q_block_alg2(int t, const DualVector& alpha,
                                   const DualVector& beta,
                                   const PrivacyMapping& Q,
                                   const TrainingSet& ts, double theta,
                                   const RiskConfig& cfg,
                                   const SolverConfig& scfg) {
  require_count_kernel(cfg, "update_Q_block_alg2");
  const auto h_form = RiskForm::for_h(ts, cfg);
  std::vector<RiskForm> forms{RiskForm::for_g(ts, cfg)};
  std::vector<const std::vector<double>*> betas{&beta.values};
  const auto blk = make_alg2_block(t, h_form, alpha.values, forms, betas,
                                   theta, scfg.mu, Q, ts, cfg.loss);
  PrivacyMapping out = Q;
  out.tables[t] = descend_block_alg2(blk, Q.tables[t], scfg);
  return out;
}

ThetaStarResult find_theta_star(const TrainingSet& ts, const RiskConfig& cfg,
                                const SolverConfig& scfg) {
  return maximize_constraint_dual(ts, cfg, scfg, RiskForm::for_g(ts, cfg),
                                  scfg.seed, scfg.z_card);
}

SolveResult optimize_npo(const TrainingSet& ts, double theta,
                         const DualVector& warm_beta,
                         const PrivacyMapping& warm_Q, const RiskConfig& cfg,
                         const SolverConfig& scfg) {
  std::vector<RiskForm> forms;
  std::vector<std::vector<double>> betas;
  if (!(std::isinf(theta) && theta < 0.0)) {
    forms.push_back(RiskForm::for_g(ts, cfg));
    betas.push_back(warm_beta.values);
  }
  return run_barrier_descent(ts, cfg, scfg, theta, forms, std::move(betas),
                             warm_Q);
}

SolveResult optimize_npo_mary(const TrainingSet& ts, const RiskConfig& cfg,
                              const SolverConfig& scfg) {
  ts.validate();
  if (ts.g_is_binary())
    throw DomainError("m-ary solve requires labels in {0..m-1}");
  const auto alphabet = ts.g_alphabet();
  const int m = static_cast<int>(alphabet.size());

  struct PairRun {
    ThetaStarResult sub;
    std::vector<double> beta_full;  // expanded to full length
  };
  std::vector<PairRun> runs;
  std::vector<double> theta_stars;
  std::vector<RiskForm> forms;
  for (int g = 1; g < m; ++g) {
    TrainingSet sub;
    std::vector<int> orig;
    for (int i = 0; i < ts.size(); ++i) {
      if (ts.gs[i] != 0 && ts.gs[i] != g) continue;
      sub.xs.push_back(ts.xs[i]);
      sub.hs.push_back(ts.hs[i]);
      sub.gs.push_back(ts.gs[i] == 0 ? -1 : 1);
      orig.push_back(i);
    }
    PairRun run;
    run.sub = maximize_constraint_dual(sub, cfg, scfg,
                                       RiskForm::for_g(sub, cfg),
                                       scfg.seed + static_cast<std::uint64_t>(g - 1),
                                       scfg.z_card);
    run.beta_full.assign(ts.size(), 0.0);
    for (std::size_t a = 0; a < orig.size(); ++a)
      run.beta_full[orig[a]] = run.sub.beta.values[a];
    theta_stars.push_back(run.sub.theta_star);
    runs.push_back(std::move(run));
    forms.push_back(RiskForm::for_g_pair(ts, cfg, g));
  }

  const double theta_min =
      *std::min_element(theta_stars.begin(), theta_stars.end());
  if (theta_min <= 0.0)
    throw BarrierViolation("nonpositive privacy threshold ceiling");
  const double theta = scfg.p_ratio * theta_min;

  // Choose the warm-start mapping: each stage-1 run proposes its own Q;
  // take the one whose worst constraint dual (after re-ascending the other
  // pairs' duals) is largest.
  const int n = ts.size();
  int best_run = -1;
  double best_score = -kInf;
  std::vector<std::vector<double>> best_betas;
  for (std::size_t j = 0; j < runs.size(); ++j) {
    GramCache cache(ts, cfg, runs[j].sub.Q);
    std::vector<std::vector<double>> cand_betas(runs.size());
    double score = kInf;
    for (std::size_t g = 0; g < runs.size(); ++g) {
      if (g == j) {
        cand_betas[g] = runs[j].beta_full;
      } else {
        cand_betas[g] = ascend_dual(forms[g], cfg.loss, cache.full(), n,
                                    midbox_start(forms[g], cfg.loss, n),
                                    scfg.inner)
                            .values;
      }
      score = std::min(score, dual_value_on_gram(forms[g], cand_betas[g],
                                                 cache.full(), n, cfg.loss));
    }
    if (score > best_score) {
      best_score = score;
      best_run = static_cast<int>(j);
      best_betas = std::move(cand_betas);
    }
  }
  if (best_run < 0 || best_score <= theta)
    throw BarrierViolation("no stage-1 mapping satisfies all constraints");

  auto out = run_barrier_descent(ts, cfg, scfg, theta, forms,
                                 std::move(best_betas), runs[best_run].sub.Q);
  out.theta_star = theta_min;
  out.theta_stars = theta_stars;
  for (const auto& run : runs) out.stage1_traces.push_back(run.sub.trace);
  return out;
}

SolveResult optimize_bayes_metric(const TrainingSet& ts, const RiskConfig& cfg,
                                  const SolverConfig& scfg) {
  const auto form = RiskForm::for_g_unnormalized(ts, cfg);
  auto stage1 =
      maximize_constraint_dual(ts, cfg, scfg, form, scfg.seed, scfg.z_card);
  if (stage1.theta_star <= 0.0)
    throw BarrierViolation("nonpositive privacy threshold ceiling");
  const double theta = scfg.p_ratio * stage1.theta_star;
  auto out = run_barrier_descent(ts, cfg, scfg, theta, {form},
                                 {stage1.beta.values}, stage1.Q);
  out.theta_star = stage1.theta_star;
  out.theta_stars = {stage1.theta_star};
  out.stage1_traces = {stage1.trace};
  return out;
}

SolveResult solve_npo_pipeline(const TrainingSet& ts, const RiskConfig& cfg,
                               const SolverConfig& scfg) {
  auto stage1 = find_theta_star(ts, cfg, scfg);
  if (stage1.theta_star <= 0.0)
    throw BarrierViolation("nonpositive privacy threshold ceiling");
  const double theta = scfg.p_ratio * stage1.theta_star;
  auto out = optimize_npo(ts, theta, stage1.beta, stage1.Q, cfg, scfg);
  out.theta_star = stage1.theta_star;
  out.theta_stars = {stage1.theta_star};
  out.stage1_traces = {stage1.trace};
  return out;
}

int predict_H(const SolveResult& result, const TrainingSet& ts,
              const RiskConfig& cfg, const std::vector<int>& x,
              PredictMode mode, std::uint64_t sample_seed) {
  const int n = ts.size();
  if (static_cast<int>(result.alpha.values.size()) != n)
    throw LengthMismatch("alpha length does not match training set");
  double score = 0.0;
  if (mode == PredictMode::kExpected) {
    for (int i = 0; i < n; ++i) {
      if (result.alpha.values[i] == 0.0) continue;
      score += result.alpha.values[i] * ts.hs[i] *
               kernel_Q(ts.xs[i], x, result.Q, cfg.kernel);
    }
  } else {
    require_count_kernel(cfg, "sampled prediction");
    Rng rng(sample_seed);
    std::vector<int> z(result.Q.s);
    for (int t = 0; t < result.Q.s; ++t) {
      std::vector<double> row(result.Q.row(t, x[t]),
                              result.Q.row(t, x[t]) + result.Q.z_card);
      z[t] = rng.discrete(row) + 1;
    }
    for (int i = 0; i < n; ++i) {
      if (result.alpha.values[i] == 0.0) continue;
      double mix = 0.0;
      for (int t = 0; t < result.Q.s; ++t)
        mix += result.Q.at(t, ts.xs[i][t], z[t]);
      score += result.alpha.values[i] * ts.hs[i] * mix;
    }
  }
  return score < 0.0 ? -1 : 1;
}

}  // namespace privmap
