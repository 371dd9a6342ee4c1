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

#ifndef SECPE_NORMAL_HPP
#define SECPE_NORMAL_HPP

#include <cmath>
#include <limits>

#include "secpe/errors.hpp"

namespace secpe {

// Standard normal CDF, PDF and quantile.
//
// norm_cdf evaluates via erfc so the tails keep full relative accuracy
// (absolute error well below 1e-12 over the whole line). inv_norm_cdf uses
// Acklam's rational approximation (~1.15e-9 relative) polished by one
// Newton step against the erfc-based CDF, which brings the absolute error
// to the 1e-15 range; budget capacities at priors around 1e-4 depend on
// these tail quantiles.

inline double norm_pdf(double x) {
  static const double kInvSqrt2Pi = 0.3989422804014326779399461;
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

// Phi(x); saturates to exactly 0/1 toward +-infinity.
inline double norm_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865475244008444);
}

// 1 - Phi(x) = Phi(-x), accurate for large positive x.
inline double norm_cdf_complement(double x) {
  return 0.5 * std::erfc(x * 0.7071067811865475244008444);
}

namespace detail {

// Acklam's inverse normal CDF approximation.
inline double inv_norm_cdf_approx(double q) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double q_low = 0.02425;

  if (q < q_low) {
    double u = std::sqrt(-2.0 * std::log(q));
    return (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u +
            c[5]) /
           ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  }
  if (q <= 1.0 - q_low) {
    double u = q - 0.5;
    double t = u * u;
    return (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t +
            a[5]) *
           u /
           (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t +
            1.0);
  }
  double u = std::sqrt(-2.0 * std::log(1.0 - q));
  return -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u +
           c[5]) /
         ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
}

}  // namespace detail

// Phi^{-1}(q) for q in (0,1).
inline double inv_norm_cdf(double q) {
  if (!(q > 0.0 && q < 1.0))
    throw ValidationError("inv_norm_cdf: q must lie in (0,1)");
  if (q == 0.5) return 0.0;

  double x = detail::inv_norm_cdf_approx(q);
  // One Newton step. The residual is formed against the nearer tail so the
  // subtraction does not cancel: for q >= 0.5, 1-q is exact (q in [0.5,1]).
  double f;
  if (x <= 0.0) {
    f = norm_cdf(x) - q;
  } else {
    f = norm_cdf_complement(x) - (1.0 - q);
    f = -f;
  }
  x -= f / norm_pdf(x);
  return x;
}

}  // namespace secpe

#endif  // SECPE_NORMAL_HPP
