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
#ifndef PRIVMAP_RNG_HPP_
#define PRIVMAP_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "privmap/errors.hpp"

namespace privmap {

// mt19937_64 with hand-rolled draws so that results are bit-reproducible
// for a given seed regardless of the standard library's distribution
// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in {lo, ..., hi} inclusive.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(gen_() % span);
  }

  // Index drawn from an unnormalized nonnegative weight vector.
  int discrete(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) throw DomainError("discrete draw from zero-mass weights");
    double u = uniform() * total;
    for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
      u -= weights[k];
      if (u < 0.0) return static_cast<int>(k);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  // Point drawn uniformly from the probability simplex (Dirichlet(1,...,1)),
  // via normalized exponentials.
  std::vector<double> simplex(int dim) {
    std::vector<double> row(dim);
    double total = 0.0;
    for (int k = 0; k < dim; ++k) {
      double u = uniform();
      if (u <= 0.0) u = 0x1.0p-53;
      row[k] = -std::log(u);
      total += row[k];
    }
    for (int k = 0; k < dim; ++k) row[k] /= total;
    return row;
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace privmap

#endif  // PRIVMAP_RNG_HPP_
