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

// Test-only oracles, deliberately independent of the library's numerical
// paths: the normal CDF comes from long-double Gauss-Legendre quadrature
// of the density, quantiles from bisection over that CDF, the blow-up
// from a threshold search, and LP optima from vertex enumeration.

#ifndef SECPE_TESTS_ORACLES_HPP
#define SECPE_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

// 20-point Gauss-Legendre nodes/weights on [-1, 1].
inline const long double kGlNodes[10] = {
    0.0765265211334973337546404L, 0.2277858511416450780804962L,
    0.3737060887154195606725482L, 0.5108670019508270980043641L,
    0.6360536807265150254528367L, 0.7463319064601507926143051L,
    0.8391169718222188233945291L, 0.9122344282513259058677524L,
    0.9639719272779137912676661L, 0.9931285991850949247861224L};
inline const long double kGlWeights[10] = {
    0.1527533871307258506980843L, 0.1491729864726037467878287L,
    0.1420961093183820513292983L, 0.1316886384491766268984945L,
    0.1181945319615184173123774L, 0.1019301198172404350367501L,
    0.0832767415767047487247581L, 0.0626720483341090635695065L,
    0.0406014298003869413310400L, 0.0176140071391521183118620L};

inline long double normal_pdf(long double t) {
  const long double inv_sqrt_2pi = 0.3989422804014326779399460599343818684759L;
  return inv_sqrt_2pi * std::exp(-0.5L * t * t);
}

// integral of the standard normal density over [a, b] by composite
// Gauss-Legendre panels of width <= 1/4
inline long double integrate_pdf(long double a, long double b) {
  if (a > b) return -integrate_pdf(b, a);
  const long double panel = 0.25L;
  long double total = 0.0L;
  long double lo = a;
  while (lo < b) {
    long double hi = std::min(b, lo + panel);
    long double mid = 0.5L * (lo + hi), half = 0.5L * (hi - lo);
    long double acc = 0.0L;
    for (int i = 0; i < 10; ++i)
      acc += kGlWeights[i] * (normal_pdf(mid - half * kGlNodes[i]) +
                              normal_pdf(mid + half * kGlNodes[i]));
    total += acc * half;
    lo = hi;
  }
  return total;
}

// Phi(x); the tail beyond |x| = 40 is below 1e-300
inline long double phi(long double x) {
  if (x <= -40.0L) return 0.0L;
  if (x >= 40.0L) return 1.0L;
  if (x >= 0.0L) return 0.5L + integrate_pdf(0.0L, x);
  return 0.5L - integrate_pdf(0.0L, -x);
}

// upper tail 1 - Phi(x), integrated outward so tiny tails keep precision
inline long double phi_complement(long double x) {
  if (x <= 0.0L) return 1.0L - phi(x);
  if (x >= 40.0L) return 0.0L;
  return integrate_pdf(x, 40.0L);
}

inline long double phi_inv(long double q) {
  long double lo = -40.0L, hi = 40.0L;
  for (int i = 0; i < 200; ++i) {
    long double mid = 0.5L * (lo + hi);
    if (phi(mid) < q)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5L * (lo + hi);
}

// sup P([t, inf)) over thresholds with Q([t, inf)) <= alpha, where
// P = sum_k pmf[k] N(k, sigma^2) and Q = N(0, sigma^2). A coarse scan
// locates the feasibility boundary, bisection refines it; both P and Q are
// evaluated with the quadrature CDF only.
inline double blowup_threshold_search(const std::vector<double>& pmf,
                                      double sigma, double alpha) {
  auto q_tail = [&](long double t) {
    return phi_complement(t / static_cast<long double>(sigma));
  };
  auto p_tail = [&](long double t) {
    long double acc = 0.0L;
    for (std::size_t k = 0; k < pmf.size(); ++k)
      acc += static_cast<long double>(pmf[k]) *
             phi_complement((t - static_cast<long double>(k)) /
                            static_cast<long double>(sigma));
    return acc;
  };
  // scan for the smallest feasible threshold; P([t,inf)) decreases in t,
  // so the supremum sits at the boundary Q([t,inf)) = alpha
  const long double lo0 = -10.0L * static_cast<long double>(sigma);
  const long double hi0 = static_cast<long double>(pmf.size()) +
                          50.0L * static_cast<long double>(sigma);
  long double best = 0.0L;
  long double lo = lo0, hi = hi0;
  const int coarse = 4000;
  long double prev = lo0;
  for (int i = 0; i <= coarse; ++i) {
    long double t = lo0 + (hi0 - lo0) * i / coarse;
    if (q_tail(t) <= static_cast<long double>(alpha)) {
      best = std::max(best, p_tail(t));
      hi = t;
      lo = prev;
      break;
    }
    prev = t;
  }
  for (int i = 0; i < 120; ++i) {
    long double mid = 0.5L * (lo + hi);
    if (q_tail(mid) <= static_cast<long double>(alpha))
      hi = mid;
    else
      lo = mid;
  }
  best = std::max(best, p_tail(hi));
  return static_cast<double>(best);
}

// Exhaustive vertex enumeration for
//     max sum x  s.t.  sum_{i in S_j} x_i <= eta_j,  0 <= x_i <= 1.
// Every vertex is the solution of n tight constraints drawn from the
// secret rows and the box facets; infeasible or singular picks are
// skipped. Intended for n <= 6 and few secrets only.
inline double lp_vertex_enumeration_max_sum(
    std::size_t n, const std::vector<std::vector<std::size_t>>& secrets,
    const std::vector<double>& etas) {
  struct Row {
    std::vector<long double> a;
    long double b;
  };
  std::vector<Row> rows;
  for (std::size_t j = 0; j < secrets.size(); ++j) {
    Row r{std::vector<long double>(n, 0.0L), etas[j]};
    for (std::size_t i : secrets[j]) r.a[i] = 1.0L;
    rows.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < n; ++i) {  // x_i <= 1
    Row r{std::vector<long double>(n, 0.0L), 1.0L};
    r.a[i] = 1.0L;
    rows.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < n; ++i) {  // -x_i <= 0
    Row r{std::vector<long double>(n, 0.0L), 0.0L};
    r.a[i] = -1.0L;
    rows.push_back(std::move(r));
  }

  const std::size_t total = rows.size();
  std::vector<std::size_t> pick(n);
  double best = -1.0;

  auto feasible = [&](const std::vector<long double>& x) {
    for (const Row& r : rows) {
      long double lhs = 0.0L;
      for (std::size_t i = 0; i < n; ++i) lhs += r.a[i] * x[i];
      if (lhs > r.b + 1e-9L) return false;
    }
    return true;
  };

  auto solve_square = [&](const std::vector<std::size_t>& sel,
                          std::vector<long double>& x) {
    std::vector<std::vector<long double>> m(n,
                                            std::vector<long double>(n + 1));
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) m[r][c] = rows[sel[r]].a[c];
      m[r][n] = rows[sel[r]].b;
    }
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < n; ++r)
        if (std::fabs((double)m[r][col]) > std::fabs((double)m[piv][col]))
          piv = r;
      if (std::fabs((double)m[piv][col]) < 1e-12) return false;
      std::swap(m[col], m[piv]);
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col) continue;
        long double f = m[r][col] / m[col][col];
        if (f == 0.0L) continue;
        for (std::size_t c = col; c <= n; ++c) m[r][c] -= f * m[col][c];
      }
    }
    x.assign(n, 0.0L);
    for (std::size_t r = 0; r < n; ++r) x[r] = m[r][n] / m[r][r];
    return true;
  };

  // iterate over all n-subsets of the constraint rows
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  while (true) {
    std::vector<long double> x;
    if (solve_square(idx, x) && feasible(x)) {
      long double obj = 0.0L;
      for (long double v : x) obj += v;
      best = std::max(best, static_cast<double>(obj));
    }
    // next combination
    std::size_t i = n;
    while (i-- > 0) {
      if (idx[i] + (n - i) < total) {
        ++idx[i];
        for (std::size_t k = i + 1; k < n; ++k) idx[k] = idx[k - 1] + 1;
        break;
      }
      if (i == 0) return best;
    }
  }
}

}  // namespace oracle

#endif  // SECPE_TESTS_ORACLES_HPP
