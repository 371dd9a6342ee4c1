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

#ifndef SECPE_ACCOUNTING_HPP
#define SECPE_ACCOUNTING_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "secpe/errors.hpp"
#include "secpe/normal.hpp"

namespace secpe {

// Gaussian trade-off/blow-up curves and conversions among (p,r)-secret
// protection, mu-GDP and (eps,delta)-DP.
//
// A (p_j, r_j) pair bounds an adversary that starts with prior success
// probability at most p_j and must not exceed posterior success r_j. The
// derived capacity
//     eta_j = PhiInv(1-p_j) - PhiInv(1-r_j)
// is the Gaussian shift at which the blow-up function moves p_j exactly to
// r_j; it is the per-secret budget everything downstream calibrates to.
// The adversary's prior itself is never materialized, only its bound p_j
// enters any computation.

// Composition/conversion results clamp r just below 1 and set a flag so a
// downstream noise search can detect a vacuous budget instead of erroring.
inline constexpr double kBudgetRCap = 1.0 - 1e-15;

// trade-off curve of N(0,1) vs N(mu,1): G_mu(alpha) = Phi(PhiInv(1-alpha) - mu)
inline double gaussian_tradeoff(double mu, double alpha) {
  if (!(mu >= 0.0)) throw ValidationError("gaussian_tradeoff: mu must be >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ValidationError("gaussian_tradeoff: alpha must lie in [0,1]");
  if (alpha == 0.0) return 1.0;
  if (alpha == 1.0) return 0.0;
  // PhiInv(1-alpha) == -PhiInv(alpha) avoids rounding 1-alpha for tiny alpha.
  return norm_cdf(-inv_norm_cdf(alpha) - mu);
}

// B_mu(alpha) = 1 - G_mu(alpha); the posterior success bound at prior alpha.
inline double gaussian_blowup(double mu, double alpha) {
  if (!(mu >= 0.0)) throw ValidationError("gaussian_blowup: mu must be >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ValidationError("gaussian_blowup: alpha must lie in [0,1]");
  if (alpha == 0.0) return 0.0;
  if (alpha == 1.0) return 1.0;
  return norm_cdf_complement(-inv_norm_cdf(alpha) - mu);
}

// eta = PhiInv(1-p) - PhiInv(1-r); zero iff p == r.
inline double eta_from_budget(double p, double r) {
  if (!(p > 0.0 && p < 1.0) || !(r > 0.0 && r < 1.0))
    throw ValidationError("eta_from_budget: p and r must lie in (0,1)");
  if (p > r) throw ValidationError("eta_from_budget: requires p <= r");
  if (p == r) return 0.0;
  return inv_norm_cdf(r) - inv_norm_cdf(p);
}

// r = 1 - Phi(PhiInv(1-p) - mu); the blow-up of prior p under shift mu.
// Clamped into [p, 1 - 1e-15]: round-off at mu = 0 can land a hair below
// p, and huge shifts saturate toward 1.
inline double r_from_mu(double p, double mu) {
  if (!(p > 0.0 && p < 1.0))
    throw ValidationError("r_from_mu: p must lie in (0,1)");
  if (!(mu >= 0.0)) throw ValidationError("r_from_mu: mu must be >= 0");
  double r = norm_cdf_complement(-inv_norm_cdf(p) - mu);
  return std::min(std::max(r, p), kBudgetRCap);
}

struct BudgetEntry {
  double p = 0.0;
  double r = 0.0;
  double eta = 0.0;
};

// Per-secret (p_j, r_j) vector with derived capacities.
class SecretBudget {
 public:
  SecretBudget() = default;

  static SecretBudget uniform(std::size_t n_secrets, double p, double r) {
    SecretBudget b;
    b.entries_.reserve(n_secrets);
    for (std::size_t j = 0; j < n_secrets; ++j) b.push_back(p, r);
    return b;
  }

  void push_back(double p, double r) {
    if (!(p > 0.0 && p < 1.0) || !(r > 0.0 && r < 1.0) || p > r)
      throw ValidationError(
          "SecretBudget: each entry needs 0 < p <= r < 1 (secret #" +
          std::to_string(entries_.size()) + ")");
    entries_.push_back({p, r, eta_from_budget(p, r)});
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const BudgetEntry& operator[](std::size_t j) const { return entries_[j]; }
  const std::vector<BudgetEntry>& entries() const { return entries_; }

  std::vector<double> etas() const {
    std::vector<double> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.eta);
    return out;
  }

  bool saturated() const { return saturated_; }
  void mark_saturated() { saturated_ = true; }

 private:
  std::vector<BudgetEntry> entries_;
  bool saturated_ = false;
};

// Coordinate-wise naive composition: p = max(p1,p2), r = r1 + r2 capped
// just below 1 (cap recorded in the saturation flag).
inline SecretBudget compose_naive(const SecretBudget& b1,
                                  const SecretBudget& b2) {
  if (b1.size() != b2.size())
    throw ValidationError("compose_naive: secret dimensions differ");
  SecretBudget out;
  bool saturated = false;
  for (std::size_t j = 0; j < b1.size(); ++j) {
    double p = std::max(b1[j].p, b2[j].p);
    double r = b1[j].r + b2[j].r;
    if (r > kBudgetRCap) {
      r = kBudgetRCap;
      saturated = true;
    }
    out.push_back(p, std::max(p, r));
  }
  if (saturated || b1.saturated() || b2.saturated()) out.mark_saturated();
  return out;
}

struct DpPoint {
  double eps = 0.0;
  double delta = 0.0;

  DpPoint(double eps_, double delta_) : eps(eps_), delta(delta_) {
    if (!(eps >= 0.0)) throw ValidationError("DpPoint: eps must be >= 0");
    if (!(delta >= 0.0 && delta < 1.0))
      throw ValidationError("DpPoint: delta must lie in [0,1)");
  }
};

// Posterior bound obtained from an (eps,delta)-DP mechanism at prior p:
//   r = 1 / (1 + (e^eps + 1/c)^-1 (1-p)/p) + c*delta,  c >= 1,
// capped at 1.
inline double secret_from_dp(const DpPoint& dp, double p, double c) {
  if (!(c >= 1.0)) throw ValidationError("secret_from_dp: requires c >= 1");
  if (!(p > 0.0 && p < 1.0))
    throw ValidationError("secret_from_dp: p must lie in (0,1)");
  double odds = (1.0 - p) / p;
  double r = 1.0 / (1.0 + odds / (std::exp(dp.eps) + 1.0 / c)) + c * dp.delta;
  return std::min(r, 1.0);
}

// delta(eps) profile of a mu-GDP mechanism:
//   delta = Phi(-eps/mu + mu/2) - e^eps Phi(-eps/mu - mu/2).
inline double dp_delta_from_mu(double mu, double eps) {
  if (!(mu > 0.0)) throw ValidationError("dp_delta_from_mu: mu must be > 0");
  if (!(eps >= 0.0))
    throw ValidationError("dp_delta_from_mu: eps must be >= 0");
  double a = -eps / mu + 0.5 * mu;
  double b = -eps / mu - 0.5 * mu;
  double delta = norm_cdf(a) - std::exp(eps) * norm_cdf(b);
  return std::max(delta, 0.0);
}

}  // namespace secpe

#endif  // SECPE_ACCOUNTING_HPP
