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

#ifndef SECPE_CLUSTERING_HPP
#define SECPE_CLUSTERING_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "secpe/embedding.hpp"
#include "secpe/errors.hpp"
#include "secpe/random.hpp"

namespace secpe {

// K-means over public embeddings and the noisy release that folds in
// subsampled, clipped private vectors.
//
// The released center for cluster k pools the public mass n_k*e_k with the
// included private vectors and adds per-coordinate Gaussian noise of scale
// (2R/n_k)*sigma; the released size n_k + m_k gets additive noise of scale
// sigma. Swapping one included private vector moves the pooled mean by at
// most 2R/(n_k+m_k) <= 2R/n_k, which is exactly the sensitivity the noise
// scale covers. Released sizes may come out negative; they are not
// truncated, downstream voting consumes them raw.

struct ClusterSummary {
  std::size_t k = 0;
  std::size_t d = 0;
  std::vector<double> centers;     // k x d row-major
  std::vector<std::size_t> sizes;  // k

  std::span<double> center(std::size_t i) { return {centers.data() + i * d, d}; }
  std::span<const double> center(std::size_t i) const {
    return {centers.data() + i * d, d};
  }
};

struct NoisyClusterSummary {
  std::size_t k = 0;
  std::size_t d = 0;
  std::vector<double> centers;  // k x d row-major, perturbed
  std::vector<double> sizes;    // k, perturbed, possibly negative
  double sigma = 0.0;
  double radius = 1.0;

  std::span<const double> center(std::size_t i) const {
    return {centers.data() + i * d, d};
  }
};

namespace detail {

inline std::size_t nearest_center(const ClusterSummary& summary,
                                  std::span<const double> v) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < summary.k; ++k) {
    double dist = squared_distance(summary.center(k), v);
    if (dist < best_d) {  // ties keep the lowest index
      best_d = dist;
      best = k;
    }
  }
  return best;
}

}  // namespace detail

// Within-cluster sum of squared distances under nearest-center assignment.
inline double kmeans_objective(const EmbeddingSet& points,
                               const ClusterSummary& summary) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < summary.k; ++k)
      best = std::min(best, squared_distance(summary.center(k), points.row(i)));
    total += best;
  }
  return total;
}

// Lloyd iterations from a k-means++ seeding. Deterministic given the seed;
// at most 100 iterations, stopping once the largest center movement drops
// below 1e-6*R. Empty clusters are re-seeded to the point farthest from
// its assigned center, so released sizes are always >= 1.
inline ClusterSummary kmeans(const EmbeddingSet& points, std::size_t k,
                             std::uint64_t seed) {
  if (k < 1) throw ValidationError("kmeans: k must be >= 1");
  if (points.n < k)
    throw ValidationError("kmeans: need at least k points");

  const std::size_t n = points.n, d = points.d;
  Rng rng(seed);
  ClusterSummary summary;
  summary.k = k;
  summary.d = d;
  summary.centers.assign(k * d, 0.0);
  summary.sizes.assign(k, 0);

  // k-means++ seeding
  std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
  {
    std::size_t first = rng.uniform_index(n);
    std::copy_n(points.row(first).data(), d, summary.center(0).data());
    for (std::size_t c = 1; c < k; ++c) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        dist2[i] = std::min(dist2[i],
                            squared_distance(points.row(i),
                                             summary.center(c - 1)));
        total += dist2[i];
      }
      std::size_t pick = 0;
      if (total > 0.0) {
        double target = rng.uniform01() * total, acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          acc += dist2[i];
          if (acc >= target) {
            pick = i;
            break;
          }
        }
      } else {
        pick = rng.uniform_index(n);  // all points coincide with centers
      }
      std::copy_n(points.row(pick).data(), d, summary.center(c).data());
    }
  }

  std::vector<std::size_t> assign(n, 0);
  const double move_tol = 1e-6 * points.radius;
  for (int iter = 0; iter < 100; ++iter) {
    for (std::size_t i = 0; i < n; ++i)
      assign[i] = detail::nearest_center(summary, points.row(i));

    std::vector<double> sums(k * d, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = points.row(i);
      double* s = &sums[assign[i] * d];
      for (std::size_t c = 0; c < d; ++c) s[c] += row[c];
      ++counts[assign[i]];
    }
    // repair empty clusters before forming means
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[assign[i]] <= 1) continue;  // keep donors nonempty
        double dd = squared_distance(points.row(i),
                                     summary.center(assign[i]));
        if (dd > far_d) {
          far_d = dd;
          far = i;
        }
      }
      std::size_t old = assign[far];
      double* so = &sums[old * d];
      double* sc = &sums[c * d];
      auto row = points.row(far);
      for (std::size_t cc = 0; cc < d; ++cc) {
        so[cc] -= row[cc];
        sc[cc] += row[cc];
      }
      --counts[old];
      ++counts[c];
      assign[far] = c;
    }

    double max_move2 = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      double inv = 1.0 / static_cast<double>(counts[c]);
      auto center = summary.center(c);
      double move2 = 0.0;
      for (std::size_t cc = 0; cc < d; ++cc) {
        double next = sums[c * d + cc] * inv;
        double delta = next - center[cc];
        move2 += delta * delta;
        center[cc] = next;
      }
      max_move2 = std::max(max_move2, move2);
      summary.sizes[c] = counts[c];
    }
    if (max_move2 <= move_tol * move_tol) break;
  }
  return summary;
}

// Noisy release of public clusters shifted by subsampled private vectors.
//
// Each private vector (pre-clipped to R) is included with probability
// rho_i, assigned to its nearest public center (ties to the lowest index),
// and pooled into that cluster. Randomness is pre-split from the seed per
// record and per cluster, so any parallel schedule reproduces the
// sequential output bit for bit.
inline NoisyClusterSummary secret_clustering(const ClusterSummary& pub,
                                             const EmbeddingSet& priv,
                                             const std::vector<double>& rhos,
                                             double sigma, std::uint64_t seed) {
  if (rhos.size() != priv.n)
    throw ValidationError("secret_clustering: one rho per private vector");
  if (priv.n > 0 && priv.d != pub.d)
    throw ValidationError("secret_clustering: dimension mismatch");
  if (!(sigma >= 0.0))
    throw ValidationError("secret_clustering: sigma must be >= 0");
  for (std::size_t k = 0; k < pub.k; ++k)
    if (pub.sizes[k] == 0)
      throw ValidationError(
          "secret_clustering: empty public cluster, noise scale 2R/n_k "
          "undefined");

  const std::size_t d = pub.d;
  const double radius = priv.radius;
  Rng root(seed);
  Rng include_stream = root.fork(0x1c);

  NoisyClusterSummary out;
  out.k = pub.k;
  out.d = d;
  out.sigma = sigma;
  out.radius = radius;
  out.centers.assign(pub.k * d, 0.0);
  out.sizes.assign(pub.k, 0.0);

  // pooled sums: n_k * e_k plus included private vectors
  std::vector<double> pooled(pub.k * d, 0.0);
  std::vector<std::size_t> included(pub.k, 0);
  for (std::size_t k = 0; k < pub.k; ++k) {
    auto c = pub.center(k);
    double nk = static_cast<double>(pub.sizes[k]);
    for (std::size_t cc = 0; cc < d; ++cc) pooled[k * d + cc] = nk * c[cc];
  }
  for (std::size_t i = 0; i < priv.n; ++i) {
    if (!include_stream.fork(i).bernoulli(rhos[i])) continue;
    auto row = priv.row(i);
    std::size_t k = detail::nearest_center(pub, row);
    for (std::size_t cc = 0; cc < d; ++cc) pooled[k * d + cc] += row[cc];
    ++included[k];
  }

  Rng noise_stream = root.fork(0x5e);
  for (std::size_t k = 0; k < pub.k; ++k) {
    Rng rng = noise_stream.fork(k);
    double nk = static_cast<double>(pub.sizes[k]);
    double mk = static_cast<double>(included[k]);
    double denom = nk + mk;
    double center_scale = (2.0 * radius / nk) * sigma;
    for (std::size_t cc = 0; cc < d; ++cc) {
      double noise = center_scale > 0.0 ? rng.normal(0.0, center_scale) : 0.0;
      out.centers[k * d + cc] = pooled[k * d + cc] / denom + noise;
    }
    out.sizes[k] = denom + (sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0);
  }
  return out;
}

// Total private points included in a release equals sum_k m_k; exposed for
// reports and tests via a deterministic replay of the inclusion stream.
inline std::size_t included_count(const std::vector<double>& rhos,
                                  std::uint64_t seed) {
  Rng include_stream = Rng(seed).fork(0x1c);
  std::size_t total = 0;
  for (std::size_t i = 0; i < rhos.size(); ++i)
    if (include_stream.fork(i).bernoulli(rhos[i])) ++total;
  return total;
}

}  // namespace secpe

#endif  // SECPE_CLUSTERING_HPP
