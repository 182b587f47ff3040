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
#include "privmap/losses.hpp"

#include <cmath>
#include <limits>

#include "privmap/errors.hpp"

namespace privmap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// log(1 + e^{-u}) without overflow for large |u|.
double log1p_exp_neg(double u) {
  if (u >= 0.0) return std::log1p(std::exp(-u));
  return -u + std::log1p(std::exp(u));
}

}  // namespace

LossSpec LossSpec::from_name(const std::string& name) {
  LossSpec s;
  s.name_ = name;
  if (name == "exponential") {
    s.kind_ = LossKind::kExponential;
    s.dual_lo_ = 0.0;
    s.dual_hi_ = kInf;
    s.a_ = 1.0 / std::sqrt(2.0);
    s.r_ = 2.0;
    s.phi0_ = 1.0;
  } else if (name == "logistic") {
    s.kind_ = LossKind::kLogistic;
    s.dual_lo_ = 0.0;
    s.dual_hi_ = 1.0;
    s.a_ = 1.0 / std::sqrt(2.0);
    s.r_ = 2.0;
    s.phi0_ = std::log(2.0);
  } else if (name == "hinge") {
    s.kind_ = LossKind::kHinge;
    s.dual_lo_ = 0.0;
    s.dual_hi_ = 1.0;
    s.a_ = 0.5;
    s.r_ = 1.0;
    s.phi0_ = 1.0;
  } else if (name == "quadratic") {
    s.kind_ = LossKind::kQuadratic;
    s.dual_lo_ = -kInf;
    s.dual_hi_ = kInf;
    s.a_ = 0.5;
    s.r_ = 2.0;
    s.phi0_ = 1.0;
  } else {
    throw ConfigError("unknown loss name: " + name);
  }
  return s;
}

double LossSpec::phi(double u) const {
  switch (kind_) {
    case LossKind::kExponential:
      return std::exp(-u);
    case LossKind::kLogistic:
      return log1p_exp_neg(u);
    case LossKind::kHinge:
      return u < 1.0 ? 1.0 - u : 0.0;
    case LossKind::kQuadratic:
      return (1.0 - u) * (1.0 - u);
  }
  return 0.0;
}

double LossSpec::phi_deriv(double u) const {
  switch (kind_) {
    case LossKind::kExponential:
      return -std::exp(-u);
    case LossKind::kLogistic:
      // -1 / (1 + e^u), computed from the side that cannot overflow.
      return u >= 0.0 ? -std::exp(-u) / (1.0 + std::exp(-u))
                      : -1.0 / (1.0 + std::exp(u));
    case LossKind::kHinge:
      return u < 1.0 ? -1.0 : 0.0;  // subgradient 0 at the kink
    case LossKind::kQuadratic:
      return -2.0 * (1.0 - u);
  }
  return 0.0;
}

bool LossSpec::in_dual_domain(double xstar) const {
  return std::isfinite(xstar) && xstar >= dual_lo_ && xstar <= dual_hi_;
}

bool LossSpec::dual_slope_unbounded_at_boundary() const {
  return kind_ == LossKind::kExponential || kind_ == LossKind::kLogistic;
}

double LossSpec::phi_star_neg(double xstar) const {
  if (!in_dual_domain(xstar))
    throw DomainError("dual point " + std::to_string(xstar) +
                      " outside domain of " + name_);
  switch (kind_) {
    case LossKind::kExponential:
      return xlogx(xstar) - xstar;
    case LossKind::kLogistic:
      return xlogx(xstar) + xlogx(1.0 - xstar);
    case LossKind::kHinge:
      return -xstar;
    case LossKind::kQuadratic:
      return xstar * xstar / 4.0 - xstar;
  }
  return 0.0;
}

double LossSpec::phi_star_neg_deriv(double xstar) const {
  if (!in_dual_domain(xstar))
    throw DomainError("dual point " + std::to_string(xstar) +
                      " outside domain of " + name_);
  switch (kind_) {
    case LossKind::kExponential:
      if (xstar <= 0.0) throw DomainError("exponential dual slope at 0");
      return std::log(xstar);
    case LossKind::kLogistic:
      if (xstar <= 0.0 || xstar >= 1.0)
        throw DomainError("logistic dual slope at boundary");
      return std::log(xstar / (1.0 - xstar));
    case LossKind::kHinge:
      return -1.0;
    case LossKind::kQuadratic:
      return xstar / 2.0 - 1.0;
  }
  return 0.0;
}

double LossSpec::min_conditional_risk(double eta) const {
  if (eta < 0.0 || eta > 1.0) throw DomainError("eta outside [0,1]");
  switch (kind_) {
    case LossKind::kExponential:
      return 2.0 * std::sqrt(eta * (1.0 - eta));
    case LossKind::kLogistic:
      return -xlogx(eta) - xlogx(1.0 - eta);
    case LossKind::kHinge:
      return 2.0 * std::min(eta, 1.0 - eta);
    case LossKind::kQuadratic:
      return 4.0 * eta * (1.0 - eta);
  }
  return 0.0;
}

double loss_eval(const LossSpec& loss, double u) { return loss.phi(u); }

double loss_dual_eval(const LossSpec& loss, double xstar) {
  return loss.phi_star_neg(xstar);
}

Assumption3Constants assumption3_constants(const LossSpec& loss) {
  return {loss.a(), loss.r()};
}

}  // namespace privmap
