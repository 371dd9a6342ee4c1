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

#ifndef SECPE_BENCH_HPP
#define SECPE_BENCH_HPP

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "secpe/clustering.hpp"
#include "secpe/embedding.hpp"
#include "secpe/errors.hpp"
#include "secpe/evolution.hpp"
#include "secpe/random.hpp"

namespace secpe {

// Timed comparison of pointwise voting (every private point scans all
// candidates) against representative voting (only K representatives scan).
// The distance-evaluation counts are exact, M*N and K*N, so their ratio is
// M/K regardless of hardware.

struct VoteBenchEngine {
  std::string name;
  double seconds = 0.0;
  std::size_t distance_evals = 0;
  std::vector<double> votes;
};

struct VoteBenchResult {
  VoteBenchEngine pointwise;
  VoteBenchEngine representative;
};

inline VoteBenchResult bench_vote(std::size_t m, std::size_t k,
                                  std::size_t n_syn, std::size_t d,
                                  std::uint64_t seed) {
  if (m < k) throw ValidationError("bench_vote: need M >= K");
  if (k < 1 || n_syn < 1 || d < 1)
    throw ValidationError("bench_vote: K, N_syn and d must be >= 1");

  Rng rng(seed);
  auto fill_uniform = [](EmbeddingSet& set, Rng r) {
    for (double& x : set.data) x = 2.0 * r.uniform01() - 1.0;
  };
  EmbeddingSet priv(m, d, 1.0);
  fill_uniform(priv, rng.fork(1));
  EmbeddingSet candidates(n_syn, d, 1.0);
  fill_uniform(candidates, rng.fork(2));

  // representatives: K private points (seeded pick), each carrying an
  // equal share of the M votes
  NoisyClusterSummary reps;
  reps.k = k;
  reps.d = d;
  reps.radius = 1.0;
  reps.centers.resize(k * d);
  reps.sizes.assign(k, static_cast<double>(m) / static_cast<double>(k));
  {
    Rng pick = rng.fork(3);
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + pick.uniform_index(m - i);
      std::swap(order[i], order[j]);
      std::copy_n(priv.row(order[i]).data(), d, reps.centers.data() + i * d);
    }
  }

  VoteBenchResult result;
  {
    auto start = std::chrono::steady_clock::now();
    VoteHistogram hist = pointwise_vote(priv, candidates);
    auto stop = std::chrono::steady_clock::now();
    result.pointwise = {"pointwise",
                        std::chrono::duration<double>(stop - start).count(),
                        hist.distance_evals, std::move(hist.votes)};
  }
  {
    auto start = std::chrono::steady_clock::now();
    VoteHistogram hist = vote(reps, candidates);
    auto stop = std::chrono::steady_clock::now();
    result.representative = {
        "representative", std::chrono::duration<double>(stop - start).count(),
        hist.distance_evals, std::move(hist.votes)};
  }
  return result;
}

}  // namespace secpe

#endif  // SECPE_BENCH_HPP
