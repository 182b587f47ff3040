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
//
// Count-kernel per-sensor aggregation primitives shared by the risk and
// solver translation units. For the count kernel, kappa_Q decomposes as a
// sum over sensors of row inner products, so quadratic forms and margins
// reduce to |Z|-length mixtures.
#ifndef PRIVMAP_SRC_COUNT_BLOCKS_HPP_
#define PRIVMAP_SRC_COUNT_BLOCKS_HPP_

#include <vector>

namespace privmap::detail {

// S[x-1] = sum of d[a] over participants a whose observation at sensor t
// equals x.
inline std::vector<double> coeff_mass_by_x(
    const std::vector<int>& idx, const std::vector<double>& d,
    const std::vector<std::vector<int>>& xs, int t, int x_card) {
  std::vector<double> mass(x_card, 0.0);
  for (std::size_t a = 0; a < idx.size(); ++a)
    mass[xs[idx[a]][t] - 1] += d[a];
  return mass;
}

// v[z-1] = sum_x S[x-1] * table[(x-1)*z_card + (z-1)].
inline std::vector<double> mix_with_table(const std::vector<double>& mass,
                                          const std::vector<double>& table,
                                          int x_card, int z_card) {
  std::vector<double> v(z_card, 0.0);
  for (int x = 0; x < x_card; ++x) {
    const double m = mass[x];
    if (m == 0.0) continue;
    const double* row = table.data() + static_cast<std::size_t>(x) * z_card;
    for (int z = 0; z < z_card; ++z) v[z] += m * row[z];
  }
  return v;
}

inline double norm_sq(const std::vector<double>& v) {
  double total = 0.0;
  for (double e : v) total += e * e;
  return total;
}

// u[a] += <v, row of table at participant a's observation>.
inline void add_sensor_margins(const std::vector<double>& v,
                               const std::vector<int>& idx,
                               const std::vector<std::vector<int>>& xs, int t,
                               const std::vector<double>& table, int z_card,
                               std::vector<double>* u) {
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const double* row =
        table.data() + static_cast<std::size_t>(xs[idx[a]][t] - 1) * z_card;
    double dot = 0.0;
    for (int z = 0; z < z_card; ++z) dot += v[z] * row[z];
    (*u)[a] += dot;
  }
}

// sum_t |v_t|^2 of the signed coefficients d, optionally skipping one sensor.
inline double quad_form_except(const std::vector<int>& idx,
                               const std::vector<double>& d,
                               const std::vector<std::vector<int>>& xs,
                               const std::vector<std::vector<double>>& tables,
                               int x_card, int z_card, int skip_t) {
  double total = 0.0;
  for (int t = 0; t < static_cast<int>(tables.size()); ++t) {
    if (t == skip_t) continue;
    const auto mass = coeff_mass_by_x(idx, d, xs, t, x_card);
    total += norm_sq(mix_with_table(mass, tables[t], x_card, z_card));
  }
  return total;
}

// Margins u[a] = sum_b d[b] kappa_Q(x_b, x_a) restricted to sensors != skip_t.
inline std::vector<double> margins_except(
    const std::vector<int>& idx, const std::vector<double>& d,
    const std::vector<std::vector<int>>& xs,
    const std::vector<std::vector<double>>& tables, int x_card, int z_card,
    int skip_t) {
  std::vector<double> u(idx.size(), 0.0);
  for (int t = 0; t < static_cast<int>(tables.size()); ++t) {
    if (t == skip_t) continue;
    const auto mass = coeff_mass_by_x(idx, d, xs, t, x_card);
    const auto v = mix_with_table(mass, tables[t], x_card, z_card);
    add_sensor_margins(v, idx, xs, t, tables[t], z_card, &u);
  }
  return u;
}

}  // namespace privmap::detail

#endif  // PRIVMAP_SRC_COUNT_BLOCKS_HPP_
