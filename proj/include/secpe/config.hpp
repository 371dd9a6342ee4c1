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

#ifndef SECPE_CONFIG_HPP
#define SECPE_CONFIG_HPP

#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "secpe/calibration.hpp"
#include "secpe/data.hpp"
#include "secpe/errors.hpp"
#include "secpe/evolution.hpp"
#include "secpe/http_generator.hpp"
#include "secpe/simulate.hpp"

namespace secpe {

// Strict JSON run configuration: every key is checked against a schema and
// unknown keys are rejected so typos cannot silently become defaults.

struct RunConfig {
  PipelineConfig pipeline;  // seed/threads filled from top level or CLI
  std::optional<double> budget_p;
  std::optional<double> budget_r;

  std::string backend = "mock";  // "mock" | "http"
  // mock backend
  std::size_t mock_d = 2;
  double mock_init_scale = 1.0;
  double mock_s0 = 0.5;
  double mock_gamma = 0.8;
  // http backend
  HttpGeneratorConfig http;
  std::size_t embedder_d = 64;

  // dataset paths
  std::string public_path;
  std::string private_path;
  std::string catalog_path;
  std::string secret_index_path;

  // calibration extras (cmd_calibrate)
  CalibrationMode mode = CalibrationMode::gaussian_approx;
  std::size_t rounds = 1;

  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string out_dir = ".";
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                std::initializer_list<const char*> allowed,
                                const std::string& where) {
  for (const auto& [key, ignored] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw ValidationError("config: unknown key \"" + key + "\" in " + where);
  }
}

template <class T>
T get_or(const nlohmann::json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("config: bad value for \"") + key +
                          "\"");
  }
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& doc) {
  if (!doc.is_object())
    throw ValidationError("config: top level must be a JSON object");
  detail::reject_unknown_keys(
      doc,
      {"pipeline", "budget", "backend", "mock", "generator", "embedder",
       "data", "calibration", "seed", "threads", "out"},
      "top level");

  RunConfig cfg;
  if (doc.contains("pipeline")) {
    const auto& p = doc.at("pipeline");
    detail::reject_unknown_keys(
        p, {"n_syn", "l", "t", "k", "radius", "distance"}, "\"pipeline\"");
    cfg.pipeline.n_syn = detail::get_or<std::size_t>(p, "n_syn", 1);
    cfg.pipeline.l = detail::get_or<std::size_t>(p, "l", 1);
    cfg.pipeline.t = detail::get_or<std::size_t>(p, "t", 1);
    cfg.pipeline.k = detail::get_or<std::size_t>(p, "k", 1);
    cfg.pipeline.radius = detail::get_or<double>(p, "radius", 1.0);
    std::string dist = detail::get_or<std::string>(p, "distance", "euclidean");
    if (dist == "euclidean")
      cfg.pipeline.distance = DistanceMetric::euclidean;
    else if (dist == "cosine")
      cfg.pipeline.distance = DistanceMetric::cosine;
    else
      throw ValidationError("config: distance must be euclidean or cosine");
    cfg.pipeline.validate();
  }

  if (doc.contains("budget")) {
    const auto& b = doc.at("budget");
    detail::reject_unknown_keys(b, {"p", "r"}, "\"budget\"");
    if (!b.contains("p") || !b.contains("r"))
      throw ValidationError("config: budget needs both p and r");
    cfg.budget_p = b.at("p").get<double>();
    cfg.budget_r = b.at("r").get<double>();
    if (!(*cfg.budget_p > 0.0 && *cfg.budget_p < 1.0) ||
        !(*cfg.budget_r > 0.0 && *cfg.budget_r < 1.0))
      throw ValidationError("config: budget p and r must lie in (0,1)");
  }

  cfg.backend = detail::get_or<std::string>(doc, "backend", "mock");
  if (cfg.backend != "mock" && cfg.backend != "http")
    throw ValidationError("config: backend must be \"mock\" or \"http\"");

  if (doc.contains("mock")) {
    const auto& m = doc.at("mock");
    detail::reject_unknown_keys(m, {"d", "init_scale", "s0", "gamma"},
                                "\"mock\"");
    cfg.mock_d = detail::get_or<std::size_t>(m, "d", 2);
    cfg.mock_init_scale = detail::get_or<double>(m, "init_scale", 1.0);
    cfg.mock_s0 = detail::get_or<double>(m, "s0", 0.5);
    cfg.mock_gamma = detail::get_or<double>(m, "gamma", 0.8);
    if (cfg.mock_d == 0)
      throw ValidationError("config: mock.d must be >= 1");
  }

  if (doc.contains("generator")) {
    const auto& g = doc.at("generator");
    detail::reject_unknown_keys(
        g,
        {"base_url", "model", "temperature", "max_tokens", "timeout_seconds",
         "max_retries", "backoff_initial_ms", "random_prompt",
         "variation_prompt"},
        "\"generator\"");
    cfg.http.base_url = detail::get_or<std::string>(g, "base_url", "");
    cfg.http.model = detail::get_or<std::string>(g, "model", "");
    cfg.http.temperature = detail::get_or<double>(g, "temperature", 1.2);
    cfg.http.max_tokens = detail::get_or<int>(g, "max_tokens", 448);
    cfg.http.timeout_seconds =
        detail::get_or<int>(g, "timeout_seconds", 120);
    cfg.http.max_retries = detail::get_or<int>(g, "max_retries", 3);
    cfg.http.backoff_initial_ms =
        detail::get_or<int>(g, "backoff_initial_ms", 1000);
    cfg.http.random_prompt = detail::get_or<std::string>(
        g, "random_prompt", cfg.http.random_prompt);
    cfg.http.variation_prompt = detail::get_or<std::string>(
        g, "variation_prompt", cfg.http.variation_prompt);
  }

  if (doc.contains("embedder")) {
    const auto& e = doc.at("embedder");
    detail::reject_unknown_keys(e, {"d"}, "\"embedder\"");
    cfg.embedder_d = detail::get_or<std::size_t>(e, "d", 64);
    if (cfg.embedder_d == 0)
      throw ValidationError("config: embedder.d must be >= 1");
  }

  if (doc.contains("data")) {
    const auto& d = doc.at("data");
    detail::reject_unknown_keys(
        d, {"public", "private", "catalog", "secret_index"}, "\"data\"");
    cfg.public_path = detail::get_or<std::string>(d, "public", "");
    cfg.private_path = detail::get_or<std::string>(d, "private", "");
    cfg.catalog_path = detail::get_or<std::string>(d, "catalog", "");
    cfg.secret_index_path =
        detail::get_or<std::string>(d, "secret_index", "");
  }

  if (doc.contains("calibration")) {
    const auto& c = doc.at("calibration");
    detail::reject_unknown_keys(
        c, {"mode", "rounds", "rho_rule", "worst_case_shift", "pivot_rule"},
        "\"calibration\"");
    std::string mode = detail::get_or<std::string>(c, "mode", "gaussian-approx");
    if (mode == "gaussian-approx")
      cfg.mode = CalibrationMode::gaussian_approx;
    else if (mode == "exact-mixture")
      cfg.mode = CalibrationMode::exact_mixture;
    else
      throw ValidationError(
          "config: calibration.mode must be gaussian-approx or exact-mixture");
    cfg.rounds = detail::get_or<std::size_t>(c, "rounds", 1);
    if (cfg.rounds < 1)
      throw ValidationError("config: calibration.rounds must be >= 1");
    std::string rho = detail::get_or<std::string>(c, "rho_rule", "verbatim");
    if (rho == "verbatim")
      cfg.pipeline.calibration.rho_rule = RhoRule::verbatim;
    else if (rho == "max-normalized")
      cfg.pipeline.calibration.rho_rule = RhoRule::max_normalized;
    else
      throw ValidationError(
          "config: rho_rule must be verbatim or max-normalized");
    cfg.pipeline.calibration.worst_case_shift =
        detail::get_or<bool>(c, "worst_case_shift", false);
    std::string pivot = detail::get_or<std::string>(c, "pivot_rule", "bland");
    if (pivot == "bland")
      cfg.pipeline.calibration.pivot_rule = PivotRule::bland;
    else if (pivot == "dantzig")
      cfg.pipeline.calibration.pivot_rule = PivotRule::dantzig;
    else
      throw ValidationError("config: pivot_rule must be bland or dantzig");
  }

  cfg.seed = detail::get_or<std::uint64_t>(doc, "seed", 0);
  cfg.threads = detail::get_or<std::size_t>(doc, "threads", 1);
  cfg.out_dir = detail::get_or<std::string>(doc, "out", ".");
  cfg.pipeline.seed = cfg.seed;
  cfg.pipeline.threads = std::max<std::size_t>(1, cfg.threads);
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("config: malformed JSON in " + path + ": " + e.what());
  }
  return parse_run_config(doc);
}

// Secret-index sidecar for vector-valued private data:
//   { "<secret id>": [record indices...] , ... }
inline SecretIndex load_secret_index(const std::string& path,
                                     std::size_t n_records) {
  std::ifstream in(path);
  if (!in) throw IoError("load_secret_index: cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("load_secret_index: malformed JSON in " + path + ": " +
                  e.what());
  }
  if (!doc.is_object())
    throw IoError("load_secret_index: top level must be an object");
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> membership;
  for (const auto& [id, arr] : doc.items()) {
    if (!arr.is_array())
      throw IoError("load_secret_index: secret \"" + id +
                    "\" must map to an index array");
    names.push_back(id);
    membership.push_back(arr.get<std::vector<std::size_t>>());
  }
  return SecretIndex(n_records, std::move(membership), std::move(names));
}

// Uniform default budget with per-secret catalog overrides, ordered like
// build_secret_index.
inline SecretBudget build_budget(const SecretCatalog& catalog,
                                 double default_p, double default_r) {
  SecretBudget budget;
  for (const auto& [id, entry] : catalog.entries) {
    double p = entry.p.value_or(default_p);
    double r = entry.r.value_or(default_r);
    if (!(p > 0.0 && p < 1.0) || !(r > 0.0 && r < 1.0) || p > r)
      throw ValidationError("budget for secret \"" + id +
                            "\" must satisfy 0 < p <= r < 1");
    budget.push_back(p, r);
  }
  return budget;
}

}  // namespace secpe

#endif  // SECPE_CONFIG_HPP
