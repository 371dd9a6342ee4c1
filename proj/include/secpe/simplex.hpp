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

#ifndef SECPE_SIMPLEX_HPP
#define SECPE_SIMPLEX_HPP

#include <cstddef>
#include <limits>
#include <vector>

#include "secpe/errors.hpp"

namespace secpe {

// Dense primal simplex for box-constrained problems
//
//     max c.x   s.t.  A x <= b,  0 <= x <= upper,  b >= 0
//
// Upper bounds are handled implicitly (nonbasic variables sit at either
// bound), so the tableau has one row per constraint, not per box bound.
// The origin is always feasible, no phase 1. Bland's rule is the default
// pivot rule: deterministic vertices and no cycling. Dantzig's rule (most
// improving reduced cost, ties by lowest index) is offered for large
// instances; it is equally deterministic but its vertices may differ.

enum class PivotRule { bland, dantzig };

struct LpProblem {
  std::size_t n = 0;                      // structural variables
  std::vector<double> c;                  // objective, maximized
  std::vector<double> upper;              // per-variable upper bound, >= 0
  std::vector<std::vector<double>> rows;  // m x n
  std::vector<double> rhs;                // m, each >= 0
};

struct LpResult {
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
};

namespace detail {

inline constexpr double kLpTol = 1e-9;
inline constexpr double kLpPivotEps = 1e-11;

}  // namespace detail

inline LpResult solve_box_lp(const LpProblem& lp,
                             PivotRule rule = PivotRule::bland,
                             std::size_t max_iterations = 500000) {
  const std::size_t n = lp.n;
  const std::size_t m = lp.rows.size();
  const std::size_t width = n + m;  // structurals then slacks
  const double inf = std::numeric_limits<double>::infinity();

  if (lp.c.size() != n || lp.upper.size() != n || lp.rhs.size() != m)
    throw ValidationError("solve_box_lp: inconsistent problem dimensions");
  for (double b : lp.rhs)
    if (!(b >= 0.0)) throw ValidationError("solve_box_lp: rhs must be >= 0");
  for (double u : lp.upper)
    if (!(u >= 0.0))
      throw ValidationError("solve_box_lp: upper bounds must be >= 0");

  enum State : unsigned char { kLower, kUpper, kBasic };

  std::vector<double> tab(m * width, 0.0);
  std::vector<double> value(m);            // value of the basic var per row
  std::vector<double> rc(width, 0.0);      // reduced costs
  std::vector<std::size_t> basis(m);
  std::vector<State> state(width, kLower);

  for (std::size_t i = 0; i < m; ++i) {
    if (lp.rows[i].size() != n)
      throw ValidationError("solve_box_lp: constraint row has wrong length");
    double* row = &tab[i * width];
    for (std::size_t j = 0; j < n; ++j) row[j] = lp.rows[i][j];
    row[n + i] = 1.0;
    basis[i] = n + i;
    state[n + i] = kBasic;
    value[i] = lp.rhs[i];
  }
  for (std::size_t j = 0; j < n; ++j) rc[j] = lp.c[j];

  auto var_upper = [&](std::size_t j) { return j < n ? lp.upper[j] : inf; };

  LpResult res;
  for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
    // entering variable
    std::size_t enter = width;
    double best = detail::kLpTol;
    for (std::size_t j = 0; j < width; ++j) {
      if (state[j] == kBasic) continue;
      double imp = state[j] == kLower ? rc[j] : -rc[j];
      if (imp > best) {
        enter = j;
        if (rule == PivotRule::bland) break;
        best = imp;
      }
    }
    if (enter == width) break;  // optimal

    const double dir = state[enter] == kLower ? 1.0 : -1.0;

    // ratio test; t starts at the entering variable's own range (bound flip)
    double t = var_upper(enter);
    std::size_t leave_row = m;  // m means bound flip
    for (std::size_t i = 0; i < m; ++i) {
      double y = dir * tab[i * width + enter];
      double lim;
      if (y > detail::kLpPivotEps) {
        lim = value[i] / y;  // basic decreases toward 0
      } else if (y < -detail::kLpPivotEps) {
        double ub = var_upper(basis[i]);
        if (ub == inf) continue;
        lim = (value[i] - ub) / y;  // basic increases toward its upper bound
      } else {
        continue;
      }
      if (lim < -detail::kLpTol) lim = 0.0;
      if (lim < t - detail::kLpTol ||
          (lim < t + detail::kLpTol && leave_row != m &&
           basis[i] < basis[leave_row])) {
        t = lim;
        leave_row = i;
      }
    }
    if (t == inf)
      throw ValidationError("solve_box_lp: unbounded problem");
    if (t < 0.0) t = 0.0;

    for (std::size_t i = 0; i < m; ++i)
      value[i] -= dir * t * tab[i * width + enter];

    if (leave_row == m) {  // entering variable flips to its other bound
      state[enter] = state[enter] == kLower ? kUpper : kLower;
      continue;
    }

    // pivot: entering becomes basic in leave_row
    const std::size_t leaving = basis[leave_row];
    double* prow = &tab[leave_row * width];
    const double piv = prow[enter];
    // dir*piv > 0 means the leaving basic decreased, so it left at its
    // lower bound; otherwise it rose to its upper bound
    state[leaving] = (dir * piv > 0.0) ? kLower : kUpper;

    const double inv = 1.0 / piv;
    for (std::size_t j = 0; j < width; ++j) prow[j] *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave_row) continue;
      double* row = &tab[i * width];
      double f = row[enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) row[j] -= f * prow[j];
      row[enter] = 0.0;  // cut round-off drift in the pivot column
    }
    {
      double f = rc[enter];
      if (f != 0.0)
        for (std::size_t j = 0; j < width; ++j) rc[j] -= f * prow[j];
      rc[enter] = 0.0;
    }

    basis[leave_row] = enter;
    state[enter] = kBasic;
    value[leave_row] =
        (dir > 0.0 ? 0.0 : var_upper(enter)) + dir * t;
  }
  if (res.iterations >= max_iterations)
    throw ValidationError("solve_box_lp: iteration cap exceeded");

  res.x.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    if (state[j] == kUpper) res.x[j] = lp.upper[j];
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) res.x[basis[i]] = value[i];
  res.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.objective += lp.c[j] * res.x[j];
  return res;
}

}  // namespace secpe

#endif  // SECPE_SIMPLEX_HPP
