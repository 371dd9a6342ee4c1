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

#ifndef SECPE_SIMULATE_HPP
#define SECPE_SIMULATE_HPP

#include <algorithm>
#include <cstdint>
#include <vector>

#include "secpe/accounting.hpp"
#include "secpe/calibration.hpp"
#include "secpe/errors.hpp"
#include "secpe/random.hpp"

namespace secpe {

// Noise-ratio study: how much less noise secret protection needs than a
// Gaussian-DP mechanism coupled to the same (p, r) point.
//
// Records hold each secret independently with probability q. For each
// budget ratio c = r/p the secret-protection scale comes from the full
// calibration (weight LP, sampling probabilities, mean-shift
// single-Gaussian approximation, T = 1). The GDP baseline assumes full
// participation: every record holding secret j contributes, so the count
// sensitivity is the group size |D_j|, giving sigma_gdp = max_j |D_j| / mu
// with mu = eta(p, r). Reported ratio: sigma_gdp / sigma_secret (larger
// means secret protection is cheaper).

struct SimulationSpec {
  std::size_t n_records = 8000;
  std::size_t m_secrets = 400;
  double q = 0.01;   // per-record per-secret inclusion probability
  double p = 1e-4;   // prior bound
  std::vector<double> ratios = {2, 10, 50, 100, 200, 400};
  std::uint64_t seed = 0;
  PivotRule pivot_rule = PivotRule::bland;

  void validate() const {
    if (n_records < 1) throw ValidationError("simulate: N must be >= 1");
    if (m_secrets < 1) throw ValidationError("simulate: m must be >= 1");
    if (!(q > 0.0 && q <= 1.0))
      throw ValidationError("simulate: q must lie in (0,1]");
    if (!(p > 0.0 && p < 1.0))
      throw ValidationError("simulate: p must lie in (0,1)");
    if (ratios.empty()) throw ValidationError("simulate: no ratios given");
    for (double c : ratios) {
      if (!(c > 1.0)) throw ValidationError("simulate: ratios must be > 1");
      if (!(c * p < 1.0))
        throw ValidationError("simulate: ratio*p must stay below 1");
    }
  }
};

struct SimulationRow {
  double ratio = 0.0;
  double sigma_gdp = 0.0;
  double sigma_secret = 0.0;
  double noise_ratio = 0.0;
};

inline SecretIndex simulate_membership(const SimulationSpec& spec) {
  Rng rng(spec.seed);
  std::vector<std::vector<std::size_t>> membership(spec.m_secrets);
  for (std::size_t i = 0; i < spec.n_records; ++i)
    for (std::size_t j = 0; j < spec.m_secrets; ++j)
      if (rng.bernoulli(spec.q)) membership[j].push_back(i);
  return SecretIndex(spec.n_records, std::move(membership));
}

inline std::vector<SimulationRow> simulate_noise_ratio(
    const SimulationSpec& spec) {
  spec.validate();
  const SecretIndex index = simulate_membership(spec);

  std::size_t max_group = 0;
  for (std::size_t j = 0; j < index.n_secrets(); ++j)
    max_group = std::max(max_group, index.members(j).size());

  std::vector<double> ratios = spec.ratios;
  std::sort(ratios.begin(), ratios.end());
  ratios.erase(std::unique(ratios.begin(), ratios.end()), ratios.end());

  std::vector<SimulationRow> rows;
  rows.reserve(ratios.size());
  for (double c : ratios) {
    const double r = c * spec.p;
    const double mu = eta_from_budget(spec.p, r);
    CalibrationOptions opts;
    opts.pivot_rule = spec.pivot_rule;
    CalibrationResult cal =
        secret_noise(index, SecretBudget::uniform(index.n_secrets(), spec.p, r),
                     1, CalibrationMode::gaussian_approx, opts);
    SimulationRow row;
    row.ratio = c;
    row.sigma_secret = cal.sigma;
    row.sigma_gdp = static_cast<double>(max_group) / mu;
    row.noise_ratio = row.sigma_gdp / row.sigma_secret;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace secpe

#endif  // SECPE_SIMULATE_HPP
