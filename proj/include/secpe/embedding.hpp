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

#ifndef SECPE_EMBEDDING_HPP
#define SECPE_EMBEDDING_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "secpe/errors.hpp"

namespace secpe {

// n x d row-major matrix of embedding vectors with a declared clipping
// radius R.
struct EmbeddingSet {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> data;  // n * d, row-major
  double radius = 1.0;

  EmbeddingSet() = default;
  EmbeddingSet(std::size_t n_, std::size_t d_, double radius_ = 1.0)
      : n(n_), d(d_), data(n_ * d_, 0.0), radius(radius_) {
    if (d == 0) throw ValidationError("EmbeddingSet: dimension must be >= 1");
    if (!(radius > 0.0))
      throw ValidationError("EmbeddingSet: radius must be > 0");
  }

  std::span<double> row(std::size_t i) { return {data.data() + i * d, d}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * d, d};
  }
};

inline double squared_distance(std::span<const double> a,
                               std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

inline double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// v * min{1, R/||v||}; vectors already inside the ball are unchanged.
inline std::vector<double> clip(std::span<const double> v, double radius) {
  if (!(radius > 0.0)) throw ValidationError("clip: radius must be > 0");
  std::vector<double> out(v.begin(), v.end());
  double norm = l2_norm(v);
  if (norm > radius) {
    double scale = radius / norm;
    for (double& x : out) x *= scale;
  }
  return out;
}

// Clip every row to the set's declared radius, in place.
inline void clip_in_place(EmbeddingSet& set) {
  for (std::size_t i = 0; i < set.n; ++i) {
    auto r = set.row(i);
    double norm = l2_norm(r);
    if (norm > set.radius) {
      double scale = set.radius / norm;
      for (double& x : r) x *= scale;
    }
  }
}

// l2-normalize every row (zero rows stay zero) and declare R = 1; this is
// the cosine-distance mode, where nearest-neighbor order under Euclidean
// distance matches cosine similarity.
inline void normalize_rows(EmbeddingSet& set) {
  for (std::size_t i = 0; i < set.n; ++i) {
    auto r = set.row(i);
    double norm = l2_norm(r);
    if (norm > 0.0)
      for (double& x : r) x /= norm;
  }
  set.radius = 1.0;
}

}  // namespace secpe

#endif  // SECPE_EMBEDDING_HPP
