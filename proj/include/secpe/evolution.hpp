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

#ifndef SECPE_EVOLUTION_HPP
#define SECPE_EVOLUTION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "secpe/calibration.hpp"
#include "secpe/clustering.hpp"
#include "secpe/data.hpp"
#include "secpe/embedding.hpp"
#include "secpe/errors.hpp"
#include "secpe/metrics.hpp"
#include "secpe/parallel.hpp"
#include "secpe/random.hpp"

namespace secpe {

// Representative-voting evolution.
//
// Each round embeds the candidate pool, releases noisy cluster
// representatives over public+private data, lets every representative cast
// its (noisy) size as votes for its nearest candidate, keeps the top N_syn
// candidates, and refills the pool with L generator variations per
// survivor. Voting against K representatives instead of M private points
// is what drops the per-round distance work from O(M*N_syn) to O(K*N_syn).

struct VoteHistogram {
  std::vector<double> votes;         // one per candidate; may be negative
  std::vector<std::size_t> nearest;  // per representative: winning candidate
  std::size_t distance_evals = 0;
};

// Each of the K noisy centers adds its noisy size to the vote of its
// nearest candidate (ties to the lowest index). Exactly K*N distance
// evaluations.
inline VoteHistogram vote(const NoisyClusterSummary& noisy,
                          const EmbeddingSet& candidates) {
  if (candidates.n == 0)
    throw ValidationError("vote: candidate set is empty");
  if (candidates.d != noisy.d)
    throw ValidationError("vote: dimension mismatch");
  VoteHistogram hist;
  hist.votes.assign(candidates.n, 0.0);
  hist.nearest.assign(noisy.k, 0);
  for (std::size_t k = 0; k < noisy.k; ++k) {
    auto center = noisy.center(k);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < candidates.n; ++j) {
      double dist = squared_distance(center, candidates.row(j));
      if (dist < best_d) {
        best_d = dist;
        best = j;
      }
    }
    hist.nearest[k] = best;
    hist.votes[best] += noisy.sizes[k];
  }
  hist.distance_evals = noisy.k * candidates.n;
  return hist;
}

// Pointwise engine: every private point casts one vote for its nearest
// candidate. M*N distance evaluations; kept as the baseline the
// representative engine is benchmarked against.
inline VoteHistogram pointwise_vote(const EmbeddingSet& points,
                                    const EmbeddingSet& candidates) {
  if (candidates.n == 0)
    throw ValidationError("pointwise_vote: candidate set is empty");
  if (candidates.d != points.d)
    throw ValidationError("pointwise_vote: dimension mismatch");
  VoteHistogram hist;
  hist.votes.assign(candidates.n, 0.0);
  hist.nearest.assign(points.n, 0);
  for (std::size_t i = 0; i < points.n; ++i) {
    auto row = points.row(i);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < candidates.n; ++j) {
      double dist = squared_distance(row, candidates.row(j));
      if (dist < best_d) {
        best_d = dist;
        best = j;
      }
    }
    hist.nearest[i] = best;
    hist.votes[best] += 1.0;
  }
  hist.distance_evals = points.n * candidates.n;
  return hist;
}

// Indices of the n_top largest vote values, ordered by descending vote;
// ties break toward the lowest index.
inline std::vector<std::size_t> select_top(const std::vector<double>& votes,
                                           std::size_t n_top) {
  if (votes.size() < n_top)
    throw ValidationError("select_top: pool smaller than the selection size");
  std::vector<std::size_t> order(votes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (votes[a] != votes[b]) return votes[a] > votes[b];
                     return a < b;
                   });
  order.resize(n_top);
  return order;
}

enum class DistanceMetric { euclidean, cosine };

struct PipelineConfig {
  std::size_t n_syn = 1;
  std::size_t l = 1;
  std::size_t t = 1;
  std::size_t k = 1;
  double radius = 1.0;
  std::optional<SecretBudget> budget;  // absent: non-private (rho=1, sigma=0)
  std::uint64_t seed = 0;
  DistanceMetric distance = DistanceMetric::euclidean;
  CalibrationOptions calibration;
  std::size_t threads = 1;

  void validate() const {
    if (n_syn < 1 || l < 1 || t < 1 || k < 1)
      throw ValidationError(
          "PipelineConfig: n_syn, l, t and k must all be >= 1");
    if (!(radius > 0.0))
      throw ValidationError("PipelineConfig: radius must be > 0");
  }
};

// L perturbations of the sample with decaying per-round scale
// s_t = s0 * gamma^t. The unperturbed sample itself re-enters the pool as a
// survivor, so the candidate set always contains it alongside these.
inline std::vector<std::vector<double>> mock_variation(
    const std::vector<double>& sample, std::size_t l, std::size_t round,
    std::uint64_t seed, double s0, double gamma) {
  double scale = s0 * std::pow(gamma, static_cast<double>(round));
  Rng rng(seed);
  std::vector<std::vector<double>> out(l, sample);
  for (std::size_t v = 0; v < l; ++v)
    for (double& x : out[v]) x += scale > 0.0 ? rng.normal(0.0, scale) : 0.0;
  return out;
}

// Vector-space generator backend: uniform box initialization, Gaussian
// variations on the decaying schedule. Pure given the per-call seeds.
struct MockVectorGenerator {
  using Item = std::vector<double>;

  std::size_t d = 2;
  double init_scale = 1.0;  // random samples uniform in [-init_scale, init_scale]^d
  double s0 = 0.5;
  double gamma = 0.8;

  std::vector<Item> random_samples(std::size_t count, std::uint64_t seed) const {
    Rng rng(seed);
    std::vector<Item> out(count, Item(d, 0.0));
    for (auto& item : out)
      for (double& x : item) x = (2.0 * rng.uniform01() - 1.0) * init_scale;
    return out;
  }

  std::vector<Item> variations(const Item& sample, std::size_t l,
                               std::size_t round, std::uint64_t seed) const {
    return mock_variation(sample, l, round, seed, s0, gamma);
  }
};

// Vectors are their own embeddings.
struct IdentityEmbedder {
  std::size_t d = 2;
  double radius = 1.0;

  EmbeddingSet embed(const std::vector<std::vector<double>>& items) const {
    EmbeddingSet set(items.size(), d, radius);
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].size() != d)
        throw ValidationError("IdentityEmbedder: item dimension mismatch");
      std::copy(items[i].begin(), items[i].end(), set.row(i).begin());
    }
    return set;
  }
};

// Deterministic bag-of-words feature hashing into d buckets with hashed
// signs, l2-normalized. A stand-in text embedder: same input, same output.
struct HashingEmbedder {
  std::size_t d = 64;

  EmbeddingSet embed(const std::vector<std::string>& items) const {
    EmbeddingSet set(items.size(), d, 1.0);
    for (std::size_t i = 0; i < items.size(); ++i) {
      auto row = set.row(i);
      for (const auto& tok : detail::tokenize(items[i])) {
        std::uint64_t h = 1469598103934665603ULL;
        for (char c : tok) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
        row[h % d] += (h >> 32) & 1 ? 1.0 : -1.0;
      }
      double norm = l2_norm(row);
      if (norm > 0.0)
        for (double& x : row) x /= norm;
    }
    return set;
  }
};

template <class Item>
struct PipelineResult {
  std::vector<Item> items;  // final selection, descending votes
  ConvergenceReport report;
  double sigma = 0.0;
  std::vector<double> sampling_probs;
};

namespace detail {

inline void prepare_embeddings(EmbeddingSet& set, double radius,
                               DistanceMetric metric) {
  if (metric == DistanceMetric::cosine) {
    normalize_rows(set);
  } else {
    set.radius = radius;
    clip_in_place(set);
  }
}

}  // namespace detail

// One full evolution run.
//
// The public k-means summary is computed once (public data never changes);
// calibration runs once with T = cfg.t rounds in the single-Gaussian
// approximation, and every round reuses that sigma while drawing fresh
// inclusion and noise randomness. Fully deterministic for a fixed seed and
// deterministic backends.
template <class Gen, class Emb>
PipelineResult<typename Gen::Item> run_pipeline(
    const PipelineConfig& cfg, const Gen& gen, const Emb& emb,
    const std::vector<typename Gen::Item>& public_items,
    const std::vector<typename Gen::Item>& private_items,
    const SecretIndex* index = nullptr) {
  using Item = typename Gen::Item;
  cfg.validate();
  if (public_items.size() < cfg.k)
    throw ValidationError("run_pipeline: need at least k public items");
  if (private_items.empty())
    throw ValidationError("run_pipeline: private set is empty");

  const Rng root(cfg.seed);
  PipelineResult<Item> result;

  // calibration happens before any generator traffic so a vacuous budget
  // aborts the run up front
  if (cfg.budget) {
    if (!index)
      throw ValidationError("run_pipeline: budget given but no secret index");
    if (index->n_records() != private_items.size())
      throw ValidationError(
          "run_pipeline: secret index does not match the private set");
    CalibrationResult cal = secret_noise(*index, *cfg.budget, cfg.t,
                                         CalibrationMode::gaussian_approx,
                                         cfg.calibration);
    result.sigma = cal.sigma;
    result.sampling_probs = std::move(cal.sampling_probs);
  } else {
    result.sigma = 0.0;
    result.sampling_probs.assign(private_items.size(), 1.0);
  }

  EmbeddingSet public_emb = emb.embed(public_items);
  detail::prepare_embeddings(public_emb, cfg.radius, cfg.distance);
  const ClusterSummary public_clusters =
      kmeans(public_emb, cfg.k, root.fork(0xA1).seed());

  EmbeddingSet private_emb = emb.embed(private_items);
  detail::prepare_embeddings(private_emb, cfg.radius, cfg.distance);

  std::vector<Item> pool = gen.random_samples(cfg.n_syn * cfg.l,
                                              root.fork(0xB2).seed());
  if (pool.size() != cfg.n_syn * cfg.l)
    throw BackendError("run_pipeline: generator returned " +
                           std::to_string(pool.size()) + " of " +
                           std::to_string(cfg.n_syn * cfg.l) +
                           " requested initial samples",
                       0);

  result.report.rounds = cfg.t;
  std::vector<Item> survivors;
  for (std::size_t round = 0; round < cfg.t; ++round) {
    EmbeddingSet pool_emb;
    try {
      pool_emb = emb.embed(pool);
    } catch (const std::exception& e) {
      throw BackendError("run_pipeline: embedder failed at round " +
                             std::to_string(round) + ": " + e.what(),
                         static_cast<int>(round));
    }
    detail::prepare_embeddings(pool_emb, cfg.radius, cfg.distance);

    NoisyClusterSummary noisy =
        secret_clustering(public_clusters, private_emb, result.sampling_probs,
                          result.sigma, root.fork(0xC3, round).seed());
    VoteHistogram hist = vote(noisy, pool_emb);
    std::vector<std::size_t> selected = select_top(hist.votes, cfg.n_syn);

    // round diagnostics: coverage of the private points by the selection,
    // and the share of private points whose representative backed a
    // discarded candidate
    {
      EmbeddingSet sel_emb(selected.size(), pool_emb.d, pool_emb.radius);
      for (std::size_t s = 0; s < selected.size(); ++s)
        std::copy_n(pool_emb.row(selected[s]).data(), pool_emb.d,
                    sel_emb.row(s).data());
      result.report.coverage.push_back(
          coverage_distance(private_emb, sel_emb));

      std::unordered_set<std::size_t> chosen(selected.begin(), selected.end());
      std::size_t missed = 0;
      for (std::size_t i = 0; i < private_emb.n; ++i) {
        std::size_t rep = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < noisy.k; ++k) {
          double dist = squared_distance(noisy.center(k), private_emb.row(i));
          if (dist < best) {
            best = dist;
            rep = k;
          }
        }
        if (!chosen.count(hist.nearest[rep])) ++missed;
      }
      result.report.mis_selection.push_back(
          static_cast<double>(missed) / static_cast<double>(private_emb.n));
    }

    survivors.clear();
    survivors.reserve(selected.size());
    for (std::size_t idx : selected) survivors.push_back(pool[idx]);

    if (round + 1 == cfg.t) break;

    // next pool: L variations per survivor, then the survivors themselves
    std::vector<std::vector<Item>> batches(survivors.size());
    try {
      parallel_for(survivors.size(), cfg.threads, [&](std::size_t i) {
        batches[i] = gen.variations(survivors[i], cfg.l, round,
                                    root.fork(0xD4, round).fork(i).seed());
        if (batches[i].size() != cfg.l)
          throw BackendError("generator returned wrong variation count");
      });
    } catch (const BackendError& e) {
      throw BackendError("run_pipeline: generator failed at round " +
                             std::to_string(round) + ": " + e.what(),
                         static_cast<int>(round));
    } catch (const std::exception& e) {
      throw BackendError("run_pipeline: generator failed at round " +
                             std::to_string(round) + ": " + e.what(),
                         static_cast<int>(round));
    }
    pool.clear();
    pool.reserve(cfg.n_syn * (cfg.l + 1));
    for (auto& batch : batches)
      for (auto& item : batch) pool.push_back(std::move(item));
    for (auto& item : survivors) pool.push_back(item);
  }

  result.items = std::move(survivors);
  return result;
}

}  // namespace secpe

#endif  // SECPE_EVOLUTION_HPP
