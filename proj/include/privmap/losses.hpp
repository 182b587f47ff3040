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
#ifndef PRIVMAP_LOSSES_HPP_
#define PRIVMAP_LOSSES_HPP_

#include <string>

namespace privmap {

enum class LossKind { kExponential, kLogistic, kHinge, kQuadratic };

// A convex margin loss phi together with its conjugate dual and the
// constants (a, r) that control the weak privacy-budget formula.
//
// The dual is carried as psi(x*) = phi*(-x*), which is finite exactly on
// [dual_lo, dual_hi]; evaluating outside raises DomainError. The boundary
// convention 0*log 0 = 0 applies to the exponential and logistic duals.
class LossSpec {
 public:
  static LossSpec from_name(const std::string& name);  // e.g. "logistic"

  LossKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  double phi(double u) const;            // loss value
  double phi_deriv(double u) const;      // d/du phi (subgradient at kinks)
  double phi_star_neg(double xstar) const;        // phi*(-x*)
  double phi_star_neg_deriv(double xstar) const;  // d/dx* phi*(-x*)

  double dual_lo() const { return dual_lo_; }
  double dual_hi() const { return dual_hi_; }  // may be +inf
  bool in_dual_domain(double xstar) const;
  // True when d/dx* phi*(-x*) blows up at a dual-domain boundary
  // (exponential and logistic); gradients must stay interior there.
  bool dual_slope_unbounded_at_boundary() const;

  double a() const { return a_; }
  double r() const { return r_; }
  double phi_at_zero() const { return phi0_; }

  // R*_phi(eta) = inf over gamma of eta*phi(gamma) + (1-eta)*phi(-gamma),
  // by closed form for all four losses.
  double min_conditional_risk(double eta) const;

 private:
  LossSpec() = default;

  LossKind kind_ = LossKind::kLogistic;
  std::string name_;
  double dual_lo_ = 0.0;
  double dual_hi_ = 1.0;
  double a_ = 0.0;
  double r_ = 1.0;
  double phi0_ = 0.0;
};

// Spec-level wrappers.
double loss_eval(const LossSpec& loss, double u);
double loss_dual_eval(const LossSpec& loss, double xstar);
struct Assumption3Constants {
  double a;
  double r;
};
Assumption3Constants assumption3_constants(const LossSpec& loss);

}  // namespace privmap

#endif  // PRIVMAP_LOSSES_HPP_
