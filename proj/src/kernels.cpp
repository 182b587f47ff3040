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
#include "privmap/kernels.hpp"

#include <cmath>
#include <cstdint>

#include "privmap/errors.hpp"

namespace privmap {

namespace {

// Enumerates all vectors in {1..card}^s, invoking fn on each.
template <typename Fn>
void for_each_vector(int s, int card, Fn&& fn) {
  std::vector<int> v(s, 1);
  while (true) {
    fn(v);
    int t = 0;
    while (t < s && v[t] == card) {
      v[t] = 1;
      ++t;
    }
    if (t == s) return;
    ++v[t];
  }
}

double product_Q(const PrivacyMapping& Q, const std::vector<int>& z,
                 const std::vector<int>& x) {
  double p = 1.0;
  for (int t = 0; t < Q.s; ++t) p *= Q.at(t, x[t], z[t]);
  return p;
}

}  // namespace

KernelSpec KernelSpec::from_string(const std::string& text) {
  KernelSpec k;
  if (text == "count") {
    k.kind = KernelKind::kCount;
    return k;
  }
  const std::string prefix = "gaussian:";
  if (text.rfind(prefix, 0) == 0) {
    k.kind = KernelKind::kGaussian;
    try {
      k.width = std::stod(text.substr(prefix.size()));
    } catch (const std::exception&) {
      throw ConfigError("bad gaussian width in kernel spec: " + text);
    }
    if (k.width <= 0.0) throw ConfigError("gaussian width must be positive");
    return k;
  }
  if (text == "gaussian") {
    k.kind = KernelKind::kGaussian;
    return k;
  }
  throw ConfigError("unknown kernel spec: " + text);
}

std::string KernelSpec::to_string() const {
  if (kind == KernelKind::kCount) return "count";
  return "gaussian:" + std::to_string(width);
}

double KernelSpec::eval(const std::vector<int>& z,
                        const std::vector<int>& z2) const {
  if (z.size() != z2.size())
    throw LengthMismatch("message vectors of lengths " +
                         std::to_string(z.size()) + " and " +
                         std::to_string(z2.size()));
  if (kind == KernelKind::kCount) return count_kernel(z, z2);
  double d2 = 0.0;
  for (std::size_t t = 0; t < z.size(); ++t) {
    const double d = static_cast<double>(z[t] - z2[t]);
    d2 += d * d;
  }
  return std::exp(-d2 / (2.0 * width * width));
}

void PrivacyMapping::validate(double tol) const {
  if (static_cast<int>(tables.size()) != s)
    throw DomainError("mapping has " + std::to_string(tables.size()) +
                      " tables for s=" + std::to_string(s));
  for (int t = 0; t < s; ++t) {
    if (static_cast<int>(tables[t].size()) != x_card * z_card)
      throw DomainError("table " + std::to_string(t) + " has wrong shape");
    for (int x = 1; x <= x_card; ++x) {
      double sum = 0.0;
      for (int z = 1; z <= z_card; ++z) {
        const double q = at(t, x, z);
        if (q < 0.0)
          throw DomainError("negative entry in table " + std::to_string(t));
        sum += q;
      }
      if (std::abs(sum - 1.0) > tol)
        throw DomainError("row (" + std::to_string(t) + "," +
                          std::to_string(x) + ") sums to " +
                          std::to_string(sum));
    }
  }
}

bool PrivacyMapping::satisfies_qprime(double delta1, double delta2,
                                      double tol) const {
  const double center = 1.0 / static_cast<double>(z_card);
  for (int t = 0; t < s; ++t) {
    for (int z = 1; z <= z_card; ++z) {
      double col = 0.0;
      for (int x = 1; x <= x_card; ++x) col += at(t, x, z);
      if (col < delta1 - tol) return false;
    }
    for (int x = 1; x <= x_card; ++x)
      for (int z = 1; z <= z_card; ++z)
        if (std::abs(at(t, x, z) - center) < delta2 - tol) return false;
  }
  return true;
}

PrivacyMapping PrivacyMapping::uniform(int s, int x_card, int z_card) {
  PrivacyMapping q;
  q.s = s;
  q.x_card = x_card;
  q.z_card = z_card;
  q.tables.assign(s, std::vector<double>(x_card * z_card, 1.0 / z_card));
  return q;
}

PrivacyMapping PrivacyMapping::deterministic(
    const std::vector<std::vector<int>>& maps, int z_card) {
  PrivacyMapping q;
  q.s = static_cast<int>(maps.size());
  q.x_card = static_cast<int>(maps.empty() ? 0 : maps[0].size());
  q.z_card = z_card;
  q.tables.assign(q.s, std::vector<double>(q.x_card * z_card, 0.0));
  for (int t = 0; t < q.s; ++t)
    for (int x = 1; x <= q.x_card; ++x) q.at(t, x, maps[t][x - 1]) = 1.0;
  return q;
}

PrivacyMapping PrivacyMapping::random(int s, int x_card, int z_card,
                                      Rng& rng) {
  PrivacyMapping q;
  q.s = s;
  q.x_card = x_card;
  q.z_card = z_card;
  q.tables.assign(s, std::vector<double>(x_card * z_card));
  for (int t = 0; t < s; ++t)
    for (int x = 1; x <= x_card; ++x) {
      auto row = rng.simplex(z_card);
      for (int z = 1; z <= z_card; ++z) q.at(t, x, z) = row[z - 1];
    }
  return q;
}

int count_kernel(const std::vector<int>& z, const std::vector<int>& z2) {
  if (z.size() != z2.size())
    throw LengthMismatch("message vectors of lengths " +
                         std::to_string(z.size()) + " and " +
                         std::to_string(z2.size()));
  int agree = 0;
  for (std::size_t t = 0; t < z.size(); ++t)
    if (z[t] == z2[t]) ++agree;
  return agree;
}

double kernel_Q(const std::vector<int>& x, const std::vector<int>& x2,
                const PrivacyMapping& Q, const KernelSpec& k) {
  if (k.kind == KernelKind::kCount) return kernel_Q_cross(x, x2, Q, Q);

  // General double sum over Z^s x Z^s; exists as a desk-scale path.
  double states = 1.0;
  for (int t = 0; t < Q.s; ++t) states *= Q.z_card;
  if (states > 4096.0)
    throw SupportTooLarge("|Z|^s too large for the double-sum kernel path");
  std::vector<int> xv(x), x2v(x2);
  double total = 0.0;
  for_each_vector(Q.s, Q.z_card, [&](const std::vector<int>& z) {
    const double qz = product_Q(Q, z, xv);
    if (qz == 0.0) return;
    for_each_vector(Q.s, Q.z_card, [&](const std::vector<int>& z2) {
      const double qz2 = product_Q(Q, z2, x2v);
      if (qz2 == 0.0) return;
      total += qz * qz2 * k.eval(z, z2);
    });
  });
  return total;
}

double kernel_Q_cross(const std::vector<int>& x, const std::vector<int>& x2,
                      const PrivacyMapping& Qa, const PrivacyMapping& Qb) {
  if (static_cast<int>(x.size()) != Qa.s || static_cast<int>(x2.size()) != Qa.s)
    throw LengthMismatch("observation vectors do not match sensor count");
  double total = 0.0;
  for (int t = 0; t < Qa.s; ++t) {
    const double* ra = Qa.row(t, x[t]);
    const double* rb = Qb.row(t, x2[t]);
    double dot = 0.0;
    for (int z = 0; z < Qa.z_card; ++z) dot += ra[z] * rb[z];
    total += dot;
  }
  return total;
}

std::vector<double> gram_Q(const std::vector<std::vector<int>>& xs,
                           const PrivacyMapping& Q, const KernelSpec& k) {
  const int n = static_cast<int>(xs.size());
  std::vector<double> gram(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = kernel_Q(xs[i], xs[j], Q, k);
      gram[static_cast<std::size_t>(i) * n + j] = v;
      gram[static_cast<std::size_t>(j) * n + i] = v;
    }
  return gram;
}

}  // namespace privmap
