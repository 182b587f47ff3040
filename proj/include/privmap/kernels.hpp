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
#ifndef PRIVMAP_KERNELS_HPP_
#define PRIVMAP_KERNELS_HPP_

#include <string>
#include <vector>

#include "privmap/rng.hpp"

namespace privmap {

enum class KernelKind { kCount, kGaussian };

// Kernel on the message space Z^s. Parsed from "count" or "gaussian:<width>".
struct KernelSpec {
  KernelKind kind = KernelKind::kCount;
  double width = 1.0;  // gaussian only

  static KernelSpec from_string(const std::string& text);
  std::string to_string() const;

  // kappa(z, z2) for message vectors with entries in {1..z_card}.
  double eval(const std::vector<int>& z, const std::vector<int>& z2) const;
};

// Per-sensor stochastic mapping tables Q^t(z|x): the decision variables.
// tables[t] is row-major x_card x z_card; rows sum to one.
struct PrivacyMapping {
  int s = 0;
  int x_card = 0;
  int z_card = 0;
  std::vector<std::vector<double>> tables;

  double at(int t, int x, int z) const {  // x, z are 1-based
    return tables[t][(x - 1) * z_card + (z - 1)];
  }
  double& at(int t, int x, int z) {
    return tables[t][(x - 1) * z_card + (z - 1)];
  }
  // Row of sensor t's table for observation x (1-based); length z_card.
  const double* row(int t, int x) const {
    return tables[t].data() + (x - 1) * z_card;
  }

  // Every row on the simplex within tol; entries nonnegative.
  void validate(double tol = 1e-12) const;
  // Extra feasibility flags: column mass >= delta1 for all (t, z) and
  // |Q^t(z|x) - 1/z_card| >= delta2 for all entries.
  bool satisfies_qprime(double delta1, double delta2, double tol = 1e-12) const;

  static PrivacyMapping uniform(int s, int x_card, int z_card);
  // Deterministic mapping: maps[t][x-1] in {1..z_card}.
  static PrivacyMapping deterministic(const std::vector<std::vector<int>>& maps,
                                      int z_card);
  static PrivacyMapping random(int s, int x_card, int z_card, Rng& rng);
};

// Number of agreeing coordinates of two equal-length message vectors.
int count_kernel(const std::vector<int>& z, const std::vector<int>& z2);

// Marginalized kernel kappa_Q(x, x2) induced by Q. Count kernel uses the
// per-sensor factorization; other kernels use the double sum over Z^s x Z^s
// and are gated to |Z|^s <= 4096.
double kernel_Q(const std::vector<int>& x, const std::vector<int>& x2,
                const PrivacyMapping& Q, const KernelSpec& k);

// kappa_Q between observations under two different mappings (count kernel
// only); kernel_Q is the Qa == Qb case.
double kernel_Q_cross(const std::vector<int>& x, const std::vector<int>& x2,
                      const PrivacyMapping& Qa, const PrivacyMapping& Qb);

// n x n Gram matrix of kernel_Q over xs, row-major.
std::vector<double> gram_Q(const std::vector<std::vector<int>>& xs,
                           const PrivacyMapping& Q, const KernelSpec& k);

}  // namespace privmap

#endif  // PRIVMAP_KERNELS_HPP_
