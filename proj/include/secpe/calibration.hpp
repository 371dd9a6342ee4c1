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

#ifndef SECPE_CALIBRATION_HPP
#define SECPE_CALIBRATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "secpe/accounting.hpp"
#include "secpe/errors.hpp"
#include "secpe/simplex.hpp"

namespace secpe {

// Noise calibration for secret protection.
//
// Given which records hold which secrets and a per-secret budget, this
// module assigns per-record weights by linear program (total weight of the
// records holding secret j may not exceed the capacity eta_j), converts
// them to sampling probabilities, and searches for the smallest Gaussian
// noise scale under which releasing a subsampled count keeps every
// secret's blow-up below its budget. The count of sampled secret-holding
// records follows a Poisson-binomial distribution, so the released
// statistic is a Gaussian mixture; the blow-up of that mixture against the
// pure-noise distribution is what the sigma search drives below r_j.

// Record -> secrets incidence. Houses, for each secret j, the sorted list
// of indices of records containing it.
class SecretIndex {
 public:
  SecretIndex() = default;

  SecretIndex(std::size_t n_records,
              std::vector<std::vector<std::size_t>> membership,
              std::vector<std::string> names = {})
      : n_records_(n_records),
        membership_(std::move(membership)),
        names_(std::move(names)) {
    for (auto& members : membership_) {
      std::sort(members.begin(), members.end());
      members.erase(std::unique(members.begin(), members.end()),
                    members.end());
      if (!members.empty() && members.back() >= n_records_)
        throw ValidationError("SecretIndex: record index out of range");
    }
    if (!names_.empty() && names_.size() != membership_.size())
      throw ValidationError("SecretIndex: names/membership size mismatch");
  }

  std::size_t n_records() const { return n_records_; }
  std::size_t n_secrets() const { return membership_.size(); }
  const std::vector<std::size_t>& members(std::size_t j) const {
    return membership_[j];
  }
  std::string name(std::size_t j) const {
    return j < names_.size() ? names_[j] : "#" + std::to_string(j);
  }

 private:
  std::size_t n_records_ = 0;
  std::vector<std::vector<std::size_t>> membership_;
  std::vector<std::string> names_;
};

// Distribution of a count statistic on 0..k_max.
struct CountDistribution {
  std::vector<double> pmf;
  double mean = 0.0;

  static CountDistribution point_mass(std::size_t k) {
    CountDistribution d;
    d.pmf.assign(k + 1, 0.0);
    d.pmf[k] = 1.0;
    d.mean = static_cast<double>(k);
    return d;
  }
};

// Exact pmf of sum of independent Bernoulli(rho_i) by iterated convolution.
inline CountDistribution poisson_binomial(const std::vector<double>& rhos) {
  for (double r : rhos)
    if (!(r >= 0.0 && r <= 1.0))
      throw ValidationError("poisson_binomial: probabilities must be in [0,1]");
  CountDistribution d;
  d.pmf.assign(1, 1.0);
  d.pmf.reserve(rhos.size() + 1);
  for (double r : rhos) {
    d.pmf.push_back(0.0);
    for (std::size_t k = d.pmf.size(); k-- > 1;)
      d.pmf[k] = d.pmf[k] * (1.0 - r) + d.pmf[k - 1] * r;
    d.pmf[0] *= 1.0 - r;
  }
  for (std::size_t k = 0; k < d.pmf.size(); ++k)
    d.mean += static_cast<double>(k) * d.pmf[k];
  return d;
}

// Blow-up of P = sum_k pmf[k] N(k, sigma^2) against Q = N(0, sigma^2) at
// level alpha. The likelihood ratio is monotone in the observation, so the
// optimal level-alpha event is the upper-tail threshold set and
//   B(alpha) = sum_k pmf[k] (1 - Phi(PhiInv(1-alpha) - k/sigma)).
inline double mixture_blowup(const CountDistribution& dist, double sigma,
                             double alpha) {
  if (!(sigma > 0.0)) throw ValidationError("mixture_blowup: sigma must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("mixture_blowup: alpha must lie in (0,1)");
  const double z = -inv_norm_cdf(alpha);  // = PhiInv(1-alpha)
  double b = 0.0;
  for (std::size_t k = 0; k < dist.pmf.size(); ++k)
    b += dist.pmf[k] *
         norm_cdf_complement(z - static_cast<double>(k) / sigma);
  return std::min(1.0, std::max(alpha, b));
}

enum class CalibrationMode { gaussian_approx, exact_mixture };
enum class RhoRule { verbatim, max_normalized };

struct CalibrationOptions {
  PivotRule pivot_rule = PivotRule::bland;
  RhoRule rho_rule = RhoRule::verbatim;
  // use the full secret group size |D_j| as the shift instead of the
  // sampled mean: a certified single-Gaussian upper bound
  bool worst_case_shift = false;
  std::vector<double> eta_overrides;  // empty: derive from the budget
  double sigma_floor = 1e-6;
};

struct SecretCalibration {
  double eta = 0.0;
  double sigma = 0.0;
  double weight_sum = 0.0;
  bool binding = false;  // weight constraint tight at eta
};

struct CalibrationResult {
  std::vector<double> weights;
  std::vector<double> sampling_probs;
  double sigma = 0.0;
  std::size_t rounds = 1;
  CalibrationMode mode = CalibrationMode::gaussian_approx;
  std::vector<SecretCalibration> per_secret;
};

// Per-record weights maximizing total weight subject to the per-secret
// capacity constraints sum_{i in D_j} w_i <= eta_j and 0 <= w_i <= 1.
//
// The simplex optimum is a vertex, which breaks ties arbitrarily among
// interchangeable records. Records with identical secret membership enter
// every constraint identically, so averaging an optimal solution over such
// a class is a convex combination of permuted optima: still feasible, same
// total. The returned solution is that class-averaged one, which makes
// symmetric instances come out symmetric.
inline std::vector<double> solve_weights(
    const SecretIndex& index, const std::vector<double>& etas,
    PivotRule rule = PivotRule::bland) {
  const std::size_t n = index.n_records();
  const std::size_t m = index.n_secrets();
  if (etas.size() != m)
    throw ValidationError("solve_weights: one eta per secret required");
  for (double e : etas)
    if (!std::isfinite(e) || e < 0.0)
      throw ValidationError("solve_weights: etas must be finite and >= 0");

  LpProblem lp;
  lp.n = n;
  lp.c.assign(n, 1.0);
  lp.upper.assign(n, 1.0);
  lp.rows.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> row(n, 0.0);
    for (std::size_t i : index.members(j)) row[i] = 1.0;
    lp.rows.push_back(std::move(row));
    lp.rhs.push_back(etas[j]);
  }
  LpResult sol = solve_box_lp(lp, rule);

  // average within classes of identical membership signature
  std::vector<std::vector<std::size_t>> signature(n);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i : index.members(j)) signature[i].push_back(j);
  std::map<std::vector<std::size_t>, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < n; ++i) classes[signature[i]].push_back(i);
  std::vector<double> w(n, 0.0);
  for (const auto& [sig, ids] : classes) {
    double total = 0.0;
    for (std::size_t i : ids) total += sol.x[i];
    double avg = total / static_cast<double>(ids.size());
    avg = std::clamp(avg, 0.0, 1.0);
    for (std::size_t i : ids) w[i] = avg;
  }
  return w;
}

// rho_i = min(1, w_i / (max_i w_i * sum_i w_i)); the verbatim rule can
// exceed 1, in which case it is clamped (rho is a Bernoulli parameter).
inline std::vector<double> sampling_probs(const std::vector<double>& weights,
                                          RhoRule rule = RhoRule::verbatim) {
  double max_w = 0.0, sum_w = 0.0;
  for (double w : weights) {
    max_w = std::max(max_w, w);
    sum_w += w;
  }
  if (!(max_w > 0.0))
    throw ValidationError(
        "sampling_probs: all weights are zero, no usable records");
  std::vector<double> rho(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double v = rule == RhoRule::verbatim ? weights[i] / (max_w * sum_w)
                                         : weights[i] / max_w;
    rho[i] = std::clamp(v, 0.0, 1.0);
  }
  return rho;
}

// Least sigma keeping the blow-up at prior p below r.
//
// gaussian_approx treats the mixture as a single Gaussian shifted by its
// mean and composes T rounds by a sqrt(T) factor: sigma = mean*sqrt(T)/eta.
// exact_mixture (T = 1 only) bisects on the exact mixture blow-up:
// bracket [sigma_floor, 1], double the upper end until the bound holds,
// then 80 bisection steps; the returned sigma satisfies the bound.
inline double calibrate_sigma(const CountDistribution& dist, double p,
                              double r, std::size_t rounds,
                              CalibrationMode mode,
                              double sigma_floor = 1e-6) {
  if (!(p > 0.0 && p < 1.0) || !(r > 0.0 && r < 1.0))
    throw ValidationError("calibrate_sigma: budget must lie in (0,1)");
  if (!(p < r))
    throw VacuousBudgetError("calibrate_sigma: vacuous budget (p >= r)");
  if (rounds < 1) throw ValidationError("calibrate_sigma: rounds must be >= 1");

  if (mode == CalibrationMode::gaussian_approx) {
    const double eta = eta_from_budget(p, r);
    const double shift = dist.mean;
    if (!(shift > 0.0)) return sigma_floor;
    return std::max(sigma_floor,
                    shift * std::sqrt(static_cast<double>(rounds)) / eta);
  }

  if (rounds != 1)
    throw ValidationError(
        "calibrate_sigma: exact_mixture supports a single round only");
  auto bound_holds = [&](double sigma) {
    return mixture_blowup(dist, sigma, p) <= r;
  };
  if (bound_holds(sigma_floor)) return sigma_floor;
  double lo = sigma_floor, hi = 1.0;
  while (!bound_holds(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e100)
      throw ValidationError("calibrate_sigma: sigma search diverged");
  }
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    if (bound_holds(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// Full calibration: weights -> sampling probabilities -> per-secret sigma
// search over the restriction of rho to that secret's records -> max.
inline CalibrationResult secret_noise(const SecretIndex& index,
                                      const SecretBudget& budget,
                                      std::size_t rounds, CalibrationMode mode,
                                      const CalibrationOptions& opts = {}) {
  if (budget.size() != index.n_secrets())
    throw ValidationError("secret_noise: budget/secret dimension mismatch");
  if (!opts.eta_overrides.empty() &&
      opts.eta_overrides.size() != index.n_secrets())
    throw ValidationError("secret_noise: eta override dimension mismatch");

  CalibrationResult res;
  res.rounds = rounds;
  res.mode = mode;
  res.sigma = opts.sigma_floor;
  if (index.n_records() == 0) return res;

  const std::vector<double> etas =
      opts.eta_overrides.empty() ? budget.etas() : opts.eta_overrides;
  res.weights = solve_weights(index, etas, opts.pivot_rule);
  res.sampling_probs = sampling_probs(res.weights, opts.rho_rule);

  res.per_secret.resize(index.n_secrets());
  for (std::size_t j = 0; j < index.n_secrets(); ++j) {
    const auto& members = index.members(j);
    double weight_sum = 0.0;
    std::vector<double> rho_j;
    rho_j.reserve(members.size());
    for (std::size_t i : members) {
      weight_sum += res.weights[i];
      rho_j.push_back(res.sampling_probs[i]);
    }
    if (weight_sum > etas[j] + 1e-9)
      throw ValidationError("secret_noise: capacity violated for secret " +
                            index.name(j));
    CountDistribution dist = opts.worst_case_shift
                                 ? CountDistribution::point_mass(members.size())
                                 : poisson_binomial(rho_j);
    double sigma_j;
    try {
      sigma_j = calibrate_sigma(dist, budget[j].p, budget[j].r, rounds, mode,
                                opts.sigma_floor);
    } catch (const VacuousBudgetError&) {
      throw VacuousBudgetError(
          "secret_noise: vacuous budget (p >= r) for secret " + index.name(j),
          index.name(j));
    }
    res.per_secret[j] = {etas[j], sigma_j, weight_sum,
                         std::abs(weight_sum - etas[j]) <= 1e-7};
    res.sigma = std::max(res.sigma, sigma_j);
  }
  return res;
}

}  // namespace secpe

#endif  // SECPE_CALIBRATION_HPP
