// Copyright 2026 The SecPE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SECPE_RANDOM_HPP
#define SECPE_RANDOM_HPP

#include <algorithm>
#include <cstdint>
#include <vector>

#include "secpe/normal.hpp"

namespace secpe {

// Deterministic, platform-stable randomness. Draws never go through
// <random> distributions (whose streams differ across standard libraries):
// uniforms come from a splitmix64 stream and normals from the inverse CDF,
// so identical seeds give identical bytes everywhere.
//
// fork(tag) derives an independent substream from the construction seed,
// not from the evolving state; forked streams are therefore insensitive to
// how many draws the parent has made, which is what lets per-record and
// per-cluster randomness be pre-split for parallel execution.

namespace detail {

inline std::uint64_t splitmix64_next(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (b * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
  splitmix64_next(s);
  return splitmix64_next(s);
}

}  // namespace detail

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {
    // burn-in so low-entropy seeds decorrelate
    detail::splitmix64_next(state_);
  }

  std::uint64_t next_u64() { return detail::splitmix64_next(state_); }

  // uniform on the open interval (0,1)
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // uniform on [0, n)
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) %
           (n == 0 ? 1 : n);
  }

  double normal() { return inv_norm_cdf(uniform01()); }

  double normal(double mean, double stddev) {
    return mean + stddev * normal();
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Independent substream keyed on (construction seed, tag).
  Rng fork(std::uint64_t tag) const {
    return Rng(detail::mix_seed(seed_, tag));
  }

  Rng fork(std::uint64_t tag_a, std::uint64_t tag_b) const {
    return Rng(detail::mix_seed(detail::mix_seed(seed_, tag_a), tag_b));
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

// Sampler for a discrete pmf over 0..k via the precomputed CDF.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const std::vector<double>& pmf) : cdf_(pmf) {
    double acc = 0.0;
    for (double& c : cdf_) {
      acc += c;
      c = acc;
    }
    if (!cdf_.empty()) cdf_.back() = 1.0;
  }

  std::size_t sample(Rng& rng) const {
    double u = rng.uniform01();
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<std::size_t>(it - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace secpe

#endif  // SECPE_RANDOM_HPP
