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

#ifndef SECPE_METRICS_HPP
#define SECPE_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "secpe/embedding.hpp"
#include "secpe/errors.hpp"

namespace secpe {

// Embedding-space fidelity and convergence metrics.

struct GaussianSummary {
  std::size_t d = 0;
  std::vector<double> mean;        // d
  std::vector<double> covariance;  // d x d row-major, symmetric PSD
  std::size_t count = 0;
};

// Sample mean and unbiased sample covariance (divisor n-1).
inline GaussianSummary fit_gaussian(const EmbeddingSet& set) {
  if (set.n < 2)
    throw ValidationError("fit_gaussian: need at least two samples");
  GaussianSummary g;
  g.d = set.d;
  g.count = set.n;
  g.mean.assign(set.d, 0.0);
  g.covariance.assign(set.d * set.d, 0.0);
  for (std::size_t i = 0; i < set.n; ++i) {
    auto row = set.row(i);
    for (std::size_t c = 0; c < set.d; ++c) g.mean[c] += row[c];
  }
  for (double& m : g.mean) m /= static_cast<double>(set.n);
  for (std::size_t i = 0; i < set.n; ++i) {
    auto row = set.row(i);
    for (std::size_t a = 0; a < set.d; ++a) {
      double da = row[a] - g.mean[a];
      for (std::size_t b = a; b < set.d; ++b)
        g.covariance[a * set.d + b] += da * (row[b] - g.mean[b]);
    }
  }
  double inv = 1.0 / static_cast<double>(set.n - 1);
  for (std::size_t a = 0; a < set.d; ++a)
    for (std::size_t b = a; b < set.d; ++b) {
      g.covariance[a * set.d + b] *= inv;
      g.covariance[b * set.d + a] = g.covariance[a * set.d + b];
    }
  return g;
}

namespace detail {

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns the
// eigenvalues; if 'vectors' is non-null it receives the column
// eigenvectors (row-major d x d).
inline std::vector<double> symmetric_eigen(std::vector<double> a,
                                           std::size_t d,
                                           std::vector<double>* vectors) {
  std::vector<double> v;
  if (vectors) {
    v.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;
  }
  auto off = [&]() {
    double s = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) s += a[p * d + q] * a[p * d + q];
    return s;
  };
  double scale = 0.0;
  for (std::size_t i = 0; i < d * d; ++i) scale = std::max(scale, std::abs(a[i]));
  const double tol = std::max(1e-300, scale * scale * 1e-30);
  for (int sweep = 0; sweep < 100 && off() > tol; ++sweep) {
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        double apq = a[p * d + q];
        if (std::abs(apq) <= 1e-300) continue;
        double app = a[p * d + p], aqq = a[q * d + q];
        double theta = 0.5 * (aqq - app) / apq;
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          double akp = a[k * d + p], akq = a[k * d + q];
          a[k * d + p] = c * akp - s * akq;
          a[k * d + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          double apk = a[p * d + k], aqk = a[q * d + k];
          a[p * d + k] = c * apk - s * aqk;
          a[q * d + k] = s * apk + c * aqk;
        }
        if (vectors) {
          for (std::size_t k = 0; k < d; ++k) {
            double vkp = v[k * d + p], vkq = v[k * d + q];
            v[k * d + p] = c * vkp - s * vkq;
            v[k * d + q] = s * vkp + c * vkq;
          }
        }
      }
    }
  }
  std::vector<double> eig(d);
  for (std::size_t i = 0; i < d; ++i) eig[i] = a[i * d + i];
  if (vectors) *vectors = std::move(v);
  return eig;
}

// Symmetric PSD square root via eigendecomposition; small negative
// eigenvalues are clamped to zero.
inline std::vector<double> psd_sqrt(const std::vector<double>& m,
                                    std::size_t d) {
  std::vector<double> vecs;
  std::vector<double> eig = symmetric_eigen(m, d, &vecs);
  std::vector<double> out(d * d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    double lam = std::sqrt(std::max(0.0, eig[k]));
    if (lam == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i) {
      double vik = vecs[i * d + k] * lam;
      for (std::size_t j = 0; j < d; ++j) out[i * d + j] += vik * vecs[j * d + k];
    }
  }
  return out;
}

inline std::vector<double> mat_mul(const std::vector<double>& a,
                                   const std::vector<double>& b,
                                   std::size_t d) {
  std::vector<double> out(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      double aik = a[i * d + k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) out[i * d + j] += aik * b[k * d + j];
    }
  return out;
}

}  // namespace detail

// ||mu_a - mu_b||^2 + tr(S_a + S_b - 2 (S_a S_b)^{1/2}).
//
// The cross term is computed from the symmetrized product
// S_a^{1/2} S_b S_a^{1/2}, whose eigenvalues match those of S_a S_b but
// whose symmetry keeps the eigensolve stable. Tiny negative results from
// round-off are clamped to zero.
inline double frechet_distance(const GaussianSummary& a,
                               const GaussianSummary& b) {
  if (a.d != b.d)
    throw ValidationError("frechet_distance: dimension mismatch");
  const std::size_t d = a.d;
  double mean_term = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    double diff = a.mean[c] - b.mean[c];
    mean_term += diff * diff;
  }
  double trace_ab = 0.0;
  for (std::size_t c = 0; c < d; ++c)
    trace_ab += a.covariance[c * d + c] + b.covariance[c * d + c];

  std::vector<double> root_a = detail::psd_sqrt(a.covariance, d);
  std::vector<double> inner =
      detail::mat_mul(detail::mat_mul(root_a, b.covariance, d), root_a, d);
  // symmetrize before the eigensolve
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      double s = 0.5 * (inner[i * d + j] + inner[j * d + i]);
      inner[i * d + j] = s;
      inner[j * d + i] = s;
    }
  std::vector<double> eig = detail::symmetric_eigen(inner, d, nullptr);
  double trace_sqrt = 0.0;
  for (double lam : eig) trace_sqrt += std::sqrt(std::max(0.0, lam));

  double fid = mean_term + trace_ab - 2.0 * trace_sqrt;
  return std::max(0.0, fid);
}

// One-sided coverage surrogate: max over private points of the distance to
// the nearest synthetic point. Zero iff every private point coincides with
// some synthetic point. This upper-bounds the per-point coverage criterion
// the convergence analysis tracks; it is not the full Wasserstein distance.
inline double coverage_distance(const EmbeddingSet& priv,
                                const EmbeddingSet& synth) {
  if (priv.n == 0 || synth.n == 0)
    throw ValidationError("coverage_distance: sets must be nonempty");
  if (priv.d != synth.d)
    throw ValidationError("coverage_distance: dimension mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < priv.n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < synth.n; ++j)
      best = std::min(best, squared_distance(priv.row(i), synth.row(j)));
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

struct LengthStats {
  std::map<std::size_t, std::size_t> histogram;  // word count -> frequency
  double mean = 0.0;
  double median = 0.0;
  std::size_t total = 0;
};

// Whitespace-word counts per text, bucketed exactly.
inline LengthStats length_stats(const std::vector<std::string>& texts) {
  LengthStats stats;
  std::vector<std::size_t> lengths;
  lengths.reserve(texts.size());
  for (const auto& t : texts) {
    std::size_t words = 0;
    bool in_word = false;
    for (char ch : t) {
      bool space = ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r';
      if (!space && !in_word) ++words;
      in_word = !space;
    }
    lengths.push_back(words);
    ++stats.histogram[words];
  }
  stats.total = lengths.size();
  if (lengths.empty()) return stats;
  double sum = 0.0;
  for (std::size_t len : lengths) sum += static_cast<double>(len);
  stats.mean = sum / static_cast<double>(lengths.size());
  std::sort(lengths.begin(), lengths.end());
  std::size_t mid = lengths.size() / 2;
  stats.median = lengths.size() % 2 == 1
                     ? static_cast<double>(lengths[mid])
                     : 0.5 * static_cast<double>(lengths[mid - 1] + lengths[mid]);
  return stats;
}

struct ConvergenceReport {
  std::vector<double> coverage;       // per round
  std::vector<double> mis_selection;  // per round, in [0,1]
  std::size_t rounds = 0;
};

}  // namespace secpe

#endif  // SECPE_METRICS_HPP
