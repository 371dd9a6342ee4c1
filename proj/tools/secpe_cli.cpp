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

// secpe: secret-protection calibration, clustering, evolution, metrics and
// the GDP-vs-secret noise-ratio study.
//
// Exit codes: 0 success, 1 I/O, 2 validation/budget, 3 backend.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "secpe/bench.hpp"
#include "secpe/calibration.hpp"
#include "secpe/clustering.hpp"
#include "secpe/config.hpp"
#include "secpe/data.hpp"
#include "secpe/evolution.hpp"
#include "secpe/http_generator.hpp"
#include "secpe/metrics.hpp"
#include "secpe/simulate.hpp"
#include "secpe/svg.hpp"

namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir))
    throw secpe::IoError("cannot create output directory " + dir);
}

void write_text(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw secpe::IoError("cannot open " + path);
  out << contents;
  if (!out) throw secpe::IoError("write failed for " + path);
}

struct GlobalArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::string> out_dir;
};

// config with CLI overrides applied
secpe::RunConfig effective_config(const GlobalArgs& g) {
  if (g.config_path.empty())
    throw secpe::ValidationError("this command requires --config PATH");
  secpe::RunConfig cfg = secpe::load_run_config(g.config_path);
  if (g.seed) {
    cfg.seed = *g.seed;
    cfg.pipeline.seed = *g.seed;
  }
  if (g.threads) {
    cfg.threads = *g.threads;
    cfg.pipeline.threads = std::max<std::size_t>(1, *g.threads);
  }
  if (g.out_dir) cfg.out_dir = *g.out_dir;
  return cfg;
}

// ---------------------------------------------------------------- calibrate

int cmd_calibrate(const GlobalArgs& g) {
  secpe::RunConfig cfg = effective_config(g);
  if (cfg.private_path.empty())
    throw secpe::ValidationError("calibrate: config needs data.private");

  secpe::Dataset ds = secpe::load_jsonl(cfg.private_path);
  secpe::SecretCatalog catalog;
  secpe::SecretIndex index(ds.size(), {});
  secpe::SecretBudget budget;
  if (!cfg.catalog_path.empty()) {
    catalog = secpe::load_catalog(cfg.catalog_path);
    secpe::detect_secrets_catalog(ds, catalog);
    index = secpe::build_secret_index(ds, catalog);
    if (!cfg.budget_p || !cfg.budget_r)
      throw secpe::ValidationError(
          "calibrate: config needs a budget {p, r} when secrets are present");
    budget = secpe::build_budget(catalog, *cfg.budget_p, *cfg.budget_r);
  }

  secpe::CalibrationResult res = secpe::secret_noise(
      index, budget, cfg.rounds, cfg.mode, cfg.pipeline.calibration);

  double rho_min = 1.0, rho_max = 0.0, rho_sum = 0.0;
  for (double rho : res.sampling_probs) {
    rho_min = std::min(rho_min, rho);
    rho_max = std::max(rho_max, rho);
    rho_sum += rho;
  }
  double rho_mean =
      res.sampling_probs.empty() ? 0.0 : rho_sum / res.sampling_probs.size();
  if (res.sampling_probs.empty()) rho_min = 0.0;

  std::printf("calibration over %zu records, %zu secrets\n", ds.size(),
              index.n_secrets());
  std::printf("  mode   : %s, rounds T = %zu\n",
              cfg.mode == secpe::CalibrationMode::gaussian_approx
                  ? "gaussian-approx"
                  : "exact-mixture",
              cfg.rounds);
  std::printf("  sigma  : %.8g\n", res.sigma);
  std::printf("  rho    : min %.6g  mean %.6g  max %.6g\n", rho_min, rho_mean,
              rho_max);
  if (!res.per_secret.empty()) {
    std::printf("  %-16s %12s %12s %12s %8s\n", "secret", "eta", "sigma_j",
                "weight_sum", "binding");
    for (std::size_t j = 0; j < res.per_secret.size(); ++j) {
      const auto& s = res.per_secret[j];
      std::printf("  %-16s %12.6g %12.6g %12.6g %8s\n",
                  index.name(j).c_str(), s.eta, s.sigma, s.weight_sum,
                  s.binding ? "yes" : "no");
    }
  }

  ensure_out_dir(cfg.out_dir);
  nlohmann::json report;
  report["records"] = ds.size();
  report["secrets"] = index.n_secrets();
  report["sigma"] = res.sigma;
  report["rounds"] = cfg.rounds;
  report["mode"] = cfg.mode == secpe::CalibrationMode::gaussian_approx
                       ? "gaussian-approx"
                       : "exact-mixture";
  report["rho"] = {{"min", rho_min}, {"mean", rho_mean}, {"max", rho_max}};
  report["per_secret"] = nlohmann::json::array();
  for (std::size_t j = 0; j < res.per_secret.size(); ++j) {
    const auto& s = res.per_secret[j];
    report["per_secret"].push_back({{"id", index.name(j)},
                                    {"eta", s.eta},
                                    {"sigma", s.sigma},
                                    {"weight_sum", s.weight_sum},
                                    {"binding", s.binding}});
  }
  write_text((fs::path(cfg.out_dir) / "calibration.json").string(),
             report.dump(2) + "\n");
  return 0;
}

// ------------------------------------------------------------ detect-secrets

int cmd_detect_secrets(const std::string& dataset_path,
                       const std::string& catalog_path, double quantile,
                       std::size_t window, const std::string& out_dir) {
  secpe::Dataset ds = secpe::load_jsonl(dataset_path);
  ensure_out_dir(out_dir);
  secpe::SecretCatalog catalog;
  if (!catalog_path.empty()) {
    catalog = secpe::load_catalog(catalog_path);
    secpe::detect_secrets_catalog(ds, catalog);
  } else {
    catalog = secpe::detect_secrets_frequency(ds, quantile, window);
    secpe::write_catalog(catalog,
                         (fs::path(out_dir) / "catalog.json").string());
  }
  secpe::write_jsonl(ds, (fs::path(out_dir) / "annotated.jsonl").string());

  std::size_t flagged = 0;
  for (const auto& rec : ds.records)
    if (!rec.secrets.empty()) ++flagged;
  std::printf("%zu secrets, %zu of %zu records annotated\n", catalog.size(),
              flagged, ds.size());
  return 0;
}

// ---------------------------------------------------------------- cluster

int cmd_cluster(const GlobalArgs& g, std::size_t k_override) {
  secpe::RunConfig cfg = effective_config(g);
  if (cfg.public_path.empty())
    throw secpe::ValidationError("cluster: config needs data.public");
  std::size_t k = k_override > 0 ? k_override : cfg.pipeline.k;

  secpe::EmbeddingSet pub = secpe::read_embeddings(cfg.public_path);
  pub.radius = cfg.pipeline.radius;
  if (cfg.pipeline.distance == secpe::DistanceMetric::cosine)
    secpe::normalize_rows(pub);
  else
    secpe::clip_in_place(pub);
  secpe::ClusterSummary summary = secpe::kmeans(pub, k, cfg.seed);

  ensure_out_dir(cfg.out_dir);
  nlohmann::json doc;
  doc["k"] = summary.k;
  doc["d"] = summary.d;
  doc["sizes"] = summary.sizes;
  doc["objective"] = secpe::kmeans_objective(pub, summary);

  secpe::EmbeddingSet centers(summary.k, summary.d, pub.radius);
  centers.data = summary.centers;
  secpe::write_embeddings(centers,
                          (fs::path(cfg.out_dir) / "centers.bin").string());

  // noisy release when private data and a budget are configured
  if (!cfg.private_path.empty()) {
    if (!cfg.budget_p || !cfg.budget_r || cfg.secret_index_path.empty())
      throw secpe::ValidationError(
          "cluster: a noisy release needs budget {p, r} and "
          "data.secret_index");
    secpe::EmbeddingSet priv = secpe::read_embeddings(cfg.private_path);
    priv.radius = cfg.pipeline.radius;
    if (cfg.pipeline.distance == secpe::DistanceMetric::cosine)
      secpe::normalize_rows(priv);
    else
      secpe::clip_in_place(priv);
    secpe::SecretIndex index =
        secpe::load_secret_index(cfg.secret_index_path, priv.n);
    secpe::SecretBudget budget = secpe::SecretBudget::uniform(
        index.n_secrets(), *cfg.budget_p, *cfg.budget_r);
    secpe::CalibrationResult cal = secpe::secret_noise(
        index, budget, 1, cfg.mode, cfg.pipeline.calibration);
    secpe::NoisyClusterSummary noisy = secpe::secret_clustering(
        summary, priv, cal.sampling_probs, cal.sigma, cfg.seed);

    secpe::EmbeddingSet noisy_centers(noisy.k, noisy.d, priv.radius);
    noisy_centers.data = noisy.centers;
    secpe::write_embeddings(
        noisy_centers, (fs::path(cfg.out_dir) / "noisy_centers.bin").string());
    doc["sigma"] = noisy.sigma;
    doc["noisy_sizes"] = noisy.sizes;
  }

  write_text((fs::path(cfg.out_dir) / "cluster_summary.json").string(),
             doc.dump(2) + "\n");
  std::printf("kmeans: k = %zu over %zu points (d = %zu)\n", summary.k, pub.n,
              summary.d);
  return 0;
}

// ----------------------------------------------------------------- evolve

std::string report_csv(const secpe::ConvergenceReport& report) {
  std::string csv = "round,coverage_distance,mis_selection\n";
  for (std::size_t t = 0; t < report.rounds; ++t)
    csv += std::to_string(t + 1) + "," + fmt17(report.coverage[t]) + "," +
           fmt17(report.mis_selection[t]) + "\n";
  return csv;
}

std::vector<std::vector<double>> rows_of(const secpe::EmbeddingSet& set) {
  std::vector<std::vector<double>> items;
  items.reserve(set.n);
  for (std::size_t i = 0; i < set.n; ++i)
    items.emplace_back(set.row(i).begin(), set.row(i).end());
  return items;
}

int cmd_evolve(const GlobalArgs& g) {
  secpe::RunConfig cfg = effective_config(g);
  cfg.pipeline.validate();
  if (cfg.public_path.empty() || cfg.private_path.empty())
    throw secpe::ValidationError(
        "evolve: config needs data.public and data.private");
  ensure_out_dir(cfg.out_dir);

  if (cfg.backend == "mock") {
    secpe::EmbeddingSet pub = secpe::read_embeddings(cfg.public_path);
    secpe::EmbeddingSet priv = secpe::read_embeddings(cfg.private_path);
    if (pub.d != priv.d)
      throw secpe::ValidationError(
          "evolve: public/private dimension mismatch");
    if (cfg.mock_d != pub.d)
      throw secpe::ValidationError(
          "evolve: mock.d must match the embedding files");

    std::optional<secpe::SecretIndex> index;
    if (cfg.budget_p && cfg.budget_r) {
      if (cfg.secret_index_path.empty())
        throw secpe::ValidationError(
            "evolve: a budget needs data.secret_index for vector data");
      index = secpe::load_secret_index(cfg.secret_index_path, priv.n);
      cfg.pipeline.budget = secpe::SecretBudget::uniform(
          index->n_secrets(), *cfg.budget_p, *cfg.budget_r);
    }

    secpe::MockVectorGenerator gen{cfg.mock_d, cfg.mock_init_scale,
                                   cfg.mock_s0, cfg.mock_gamma};
    secpe::IdentityEmbedder emb{pub.d, cfg.pipeline.radius};
    auto res = secpe::run_pipeline(cfg.pipeline, gen, emb, rows_of(pub),
                                   rows_of(priv),
                                   index ? &*index : nullptr);

    secpe::EmbeddingSet synth(res.items.size(), pub.d, cfg.pipeline.radius);
    for (std::size_t i = 0; i < res.items.size(); ++i)
      std::copy(res.items[i].begin(), res.items[i].end(),
                synth.row(i).begin());
    secpe::write_embeddings(
        synth, (fs::path(cfg.out_dir) / "synthetic.bin").string());
    write_text((fs::path(cfg.out_dir) / "report.csv").string(),
               report_csv(res.report));
    std::printf("evolve: %zu synthetic vectors, sigma = %.6g\n",
                res.items.size(), res.sigma);
    std::printf("  final coverage_distance = %.6g\n",
                res.report.coverage.back());
    return 0;
  }

  // http backend: JSONL text datasets, hashing embedder
  secpe::Dataset pub_ds = secpe::load_jsonl(cfg.public_path);
  secpe::Dataset priv_ds = secpe::load_jsonl(cfg.private_path);

  std::optional<secpe::SecretIndex> index;
  if (cfg.budget_p && cfg.budget_r) {
    if (cfg.catalog_path.empty())
      throw secpe::ValidationError(
          "evolve: a budget needs data.catalog for text data");
    secpe::SecretCatalog catalog = secpe::load_catalog(cfg.catalog_path);
    secpe::detect_secrets_catalog(priv_ds, catalog);
    index = secpe::build_secret_index(priv_ds, catalog);
    cfg.pipeline.budget =
        secpe::build_budget(catalog, *cfg.budget_p, *cfg.budget_r);
  }

  secpe::HttpGenerator gen(cfg.http);
  secpe::HashingEmbedder emb{cfg.embedder_d};
  auto res = secpe::run_pipeline(cfg.pipeline, gen, emb, pub_ds.texts(),
                                 priv_ds.texts(), index ? &*index : nullptr);

  secpe::Dataset out_ds;
  for (std::size_t i = 0; i < res.items.size(); ++i) {
    secpe::Record rec;
    rec.id = "syn-" + std::to_string(i);
    rec.text = res.items[i];
    out_ds.records.push_back(std::move(rec));
  }
  secpe::write_jsonl(out_ds,
                     (fs::path(cfg.out_dir) / "synthetic.jsonl").string());
  write_text((fs::path(cfg.out_dir) / "report.csv").string(),
             report_csv(res.report));
  std::printf("evolve: %zu synthetic texts, sigma = %.6g\n",
              res.items.size(), res.sigma);
  return 0;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const secpe::SimulationSpec& spec,
                 const std::string& out_dir) {
  auto rows = secpe::simulate_noise_ratio(spec);
  ensure_out_dir(out_dir);

  const std::string baseline_note =
      "# sigma_gdp baseline: full participation, per-secret sensitivity = "
      "group size |D_j|, T = 1, mu = eta(p, r)";
  std::string csv = baseline_note + "\n";
  csv += "ratio,sigma_gdp,sigma_secret,noise_ratio\n";
  for (const auto& row : rows)
    csv += fmt17(row.ratio) + "," + fmt17(row.sigma_gdp) + "," +
           fmt17(row.sigma_secret) + "," + fmt17(row.noise_ratio) + "\n";
  write_text((fs::path(out_dir) / "noise_ratio.csv").string(), csv);

  secpe::SvgSeries series;
  series.label = "sigma_gdp / sigma_secret";
  for (const auto& row : rows)
    series.points.emplace_back(row.ratio, row.noise_ratio);
  write_text((fs::path(out_dir) / "noise_ratio.svg").string(),
             secpe::svg_line_plot("Noise ratio vs budget ratio", "r/p",
                                  "sigma_gdp / sigma_secret", {series}));

  std::puts(baseline_note.c_str() + 2);
  std::printf("%10s %14s %14s %12s\n", "r/p", "sigma_gdp", "sigma_secret",
              "ratio");
  for (const auto& row : rows)
    std::printf("%10g %14.6g %14.6g %12.6g\n", row.ratio, row.sigma_gdp,
                row.sigma_secret, row.noise_ratio);
  return 0;
}

// --------------------------------------------------------------------- fid

int cmd_fid(const std::string& path_a, const std::string& path_b,
            const std::string& out_dir) {
  secpe::EmbeddingSet a = secpe::read_embeddings(path_a);
  secpe::EmbeddingSet b = secpe::read_embeddings(path_b);
  if (a.d != b.d)
    throw secpe::ValidationError("fid: embedding dimensions differ (" +
                                 std::to_string(a.d) + " vs " +
                                 std::to_string(b.d) + ")");
  double fid =
      secpe::frechet_distance(secpe::fit_gaussian(a), secpe::fit_gaussian(b));
  std::printf("%.12g\n", fid);

  ensure_out_dir(out_dir);
  nlohmann::json doc;
  doc["fid"] = fid;
  doc["d"] = a.d;
  doc["n_a"] = a.n;
  doc["n_b"] = b.n;
  write_text((fs::path(out_dir) / "fid.json").string(), doc.dump(2) + "\n");
  return 0;
}

// --------------------------------------------------------------- bench-vote

int cmd_bench_vote(std::size_t m, std::size_t k, std::size_t n_syn,
                   std::size_t d, std::uint64_t seed,
                   const std::string& out_dir) {
  auto res = secpe::bench_vote(m, k, n_syn, d, seed);
  ensure_out_dir(out_dir);
  std::string csv = "engine,wall_time_seconds,distance_evals\n";
  for (const auto* e : {&res.pointwise, &res.representative})
    csv += e->name + "," + fmt17(e->seconds) + "," +
           std::to_string(e->distance_evals) + "\n";
  write_text((fs::path(out_dir) / "bench_vote.csv").string(), csv);

  double ratio = static_cast<double>(res.pointwise.distance_evals) /
                 static_cast<double>(res.representative.distance_evals);
  double speedup = res.pointwise.seconds /
                   std::max(res.representative.seconds, 1e-12);
  std::printf("%-16s %12s %16s\n", "engine", "seconds", "distance_evals");
  std::printf("%-16s %12.4f %16zu\n", "pointwise", res.pointwise.seconds,
              res.pointwise.distance_evals);
  std::printf("%-16s %12.4f %16zu\n", "representative",
              res.representative.seconds, res.representative.distance_evals);
  std::printf("distance-eval ratio = %.6g (M/K = %.6g), speedup = %.3gx\n",
              ratio, static_cast<double>(m) / static_cast<double>(k),
              speedup);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secret-protection privacy toolkit"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config_path, "JSON run configuration");
  std::uint64_t seed_val = 0;
  auto* seed_opt =
      app.add_option("--seed", seed_val, "seed overriding the config");
  std::size_t threads_val = 1;
  auto* threads_opt =
      app.add_option("--threads", threads_val, "worker thread bound");
  std::string out_val;
  auto* out_opt =
      app.add_option("--out", out_val, "output directory overriding config");

  auto* calibrate = app.add_subcommand(
      "calibrate", "solve weights and the noise scale for a dataset");

  std::string ds_path, cat_path;
  double quantile = 0.20;
  std::size_t window = 20;
  auto* detect = app.add_subcommand(
      "detect-secrets", "annotate a dataset from a catalog or by frequency");
  detect->add_option("--dataset", ds_path, "JSONL dataset")->required();
  detect->add_option("--catalog", cat_path, "keyword catalog JSON");
  detect->add_option("--quantile", quantile,
                     "frequency quantile for designation");
  detect->add_option("--window", window, "number of designated words");

  std::size_t cluster_k = 0;
  auto* cluster =
      app.add_subcommand("cluster", "k-means summary and noisy release");
  cluster->add_option("--k", cluster_k, "cluster count override");

  auto* evolve = app.add_subcommand(
      "evolve", "run the representative-voting evolution pipeline");

  secpe::SimulationSpec spec;
  std::vector<double> ratio_args;
  auto* simulate = app.add_subcommand(
      "simulate", "GDP-vs-secret noise-ratio study");
  simulate->add_option("--records", spec.n_records, "record count N");
  simulate->add_option("--secrets", spec.m_secrets, "secret count m");
  simulate->add_option("--q", spec.q, "per-record per-secret probability");
  simulate->add_option("--p", spec.p, "prior bound p");
  simulate->add_option("--ratios", ratio_args, "r/p ratios");

  std::string fid_a, fid_b;
  auto* fid = app.add_subcommand("fid", "Frechet distance of two embedding "
                                        "files");
  fid->add_option("a", fid_a, "first embedding file")->required();
  fid->add_option("b", fid_b, "second embedding file")->required();

  std::size_t bm = 100000, bk = 500, bn = 5000, bd = 64;
  auto* bench = app.add_subcommand(
      "bench-vote", "pointwise vs representative voting benchmark");
  bench->add_option("--m", bm, "private point count");
  bench->add_option("--k", bk, "representative count");
  bench->add_option("--n-syn", bn, "candidate count");
  bench->add_option("--d", bd, "dimension");

  CLI11_PARSE(app, argc, argv);

  if (*seed_opt) g.seed = seed_val;
  if (*threads_opt) g.threads = threads_val;
  if (*out_opt) g.out_dir = out_val;
  const std::string plain_out = g.out_dir.value_or(".");

  try {
    if (*calibrate) return cmd_calibrate(g);
    if (*detect) {
      if (cat_path.empty() && detect->count("--quantile") == 0 &&
          detect->count("--window") == 0)
        std::fprintf(stderr,
                     "note: no catalog given, using frequency detection "
                     "(quantile %.2f, window %zu)\n",
                     quantile, window);
      return cmd_detect_secrets(ds_path, cat_path, quantile, window,
                                plain_out);
    }
    if (*cluster) return cmd_cluster(g, cluster_k);
    if (*evolve) return cmd_evolve(g);
    if (*simulate) {
      if (!ratio_args.empty()) spec.ratios = ratio_args;
      if (g.seed) spec.seed = *g.seed;
      return cmd_simulate(spec, plain_out);
    }
    if (*fid) return cmd_fid(fid_a, fid_b, plain_out);
    if (*bench) return cmd_bench_vote(bm, bk, bn, bd, g.seed.value_or(0),
                                      plain_out);
  } catch (const secpe::VacuousBudgetError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const secpe::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const secpe::BackendError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const secpe::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
