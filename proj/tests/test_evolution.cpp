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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <vector>

#include "secpe/bench.hpp"
#include "secpe/evolution.hpp"
#include "secpe/random.hpp"

using namespace secpe;

namespace {

EmbeddingSet make_set(std::vector<std::vector<double>> rows, double radius) {
  EmbeddingSet set(rows.size(), rows.empty() ? 1 : rows[0].size(), radius);
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i].begin(), rows[i].end(), set.row(i).begin());
  return set;
}

NoisyClusterSummary make_noisy(std::vector<std::vector<double>> centers,
                               std::vector<double> sizes) {
  NoisyClusterSummary noisy;
  noisy.k = centers.size();
  noisy.d = centers.empty() ? 1 : centers[0].size();
  noisy.sizes = std::move(sizes);
  for (const auto& c : centers)
    noisy.centers.insert(noisy.centers.end(), c.begin(), c.end());
  return noisy;
}

std::vector<std::vector<double>> gaussian_clusters(
    Rng& rng, const std::vector<std::vector<double>>& centers,
    std::size_t per_cluster, double spread) {
  std::vector<std::vector<double>> out;
  for (const auto& c : centers)
    for (std::size_t i = 0; i < per_cluster; ++i) {
      std::vector<double> v = c;
      for (double& x : v) x += rng.normal(0.0, spread);
      out.push_back(std::move(v));
    }
  return out;
}

}  // namespace

TEST_CASE("vote: coincident center takes all the mass") {
  auto candidates = make_set(
      {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}}, 10.0);
  auto noisy = make_noisy({{3, 0}}, {7.0});
  auto hist = vote(noisy, candidates);
  CHECK(hist.votes == std::vector<double>({0, 0, 0, 7, 0}));
  CHECK(hist.distance_evals == 5);
}

TEST_CASE("vote: two centers accumulate on one candidate") {
  auto candidates = make_set({{0, 0}, {10, 10}}, 20.0);
  auto noisy = make_noisy({{0.1, 0}, {0, 0.2}}, {2.0, 5.0});
  auto hist = vote(noisy, candidates);
  CHECK(hist.votes[0] == Catch::Approx(7.0).margin(1e-12));
  CHECK(hist.votes[1] == 0.0);
}

TEST_CASE("vote matches the exhaustive pairwise oracle") {
  Rng rng(61);
  auto noisy_centers = std::vector<std::vector<double>>();
  for (int k = 0; k < 10; ++k) {
    std::vector<double> c(3);
    for (double& x : c) x = rng.normal();
    noisy_centers.push_back(c);
  }
  std::vector<double> sizes;
  for (int k = 0; k < 10; ++k) sizes.push_back(rng.normal(5.0, 2.0));
  auto noisy = make_noisy(noisy_centers, sizes);

  EmbeddingSet candidates(50, 3, 10.0);
  for (double& x : candidates.data) x = rng.normal();

  auto hist = vote(noisy, candidates);

  std::vector<double> expect(candidates.n, 0.0);
  for (std::size_t k = 0; k < noisy.k; ++k) {
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t j = 0; j < candidates.n; ++j) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        double diff = noisy.centers[k * 3 + c] - candidates.row(j)[c];
        d2 += diff * diff;
      }
      if (d2 < best_d) {
        best_d = d2;
        best = j;
      }
    }
    expect[best] += sizes[k];
  }
  for (std::size_t j = 0; j < candidates.n; ++j)
    CHECK(hist.votes[j] == Catch::Approx(expect[j]).margin(1e-12));
  CHECK(hist.distance_evals == noisy.k * candidates.n);
}

TEST_CASE("vote conserves the total released size") {
  Rng rng(62);
  auto noisy = make_noisy({{0, 0}, {1, 1}, {2, 0}}, {4.0, -1.5, 9.25});
  EmbeddingSet candidates(20, 2, 10.0);
  for (double& x : candidates.data) x = rng.normal();
  auto hist = vote(noisy, candidates);
  double total = std::accumulate(hist.votes.begin(), hist.votes.end(), 0.0);
  CHECK(total == Catch::Approx(4.0 - 1.5 + 9.25).margin(1e-6));
}

TEST_CASE("vote dimension mismatch") {
  auto noisy = make_noisy({{0, 0, 0}}, {1.0});
  auto candidates = make_set({{0, 0}}, 1.0);
  CHECK_THROWS_AS(vote(noisy, candidates), ValidationError);
}

TEST_CASE("select_top ordering and ties") {
  CHECK(select_top({3, 1, 2}, 2) == std::vector<std::size_t>({0, 2}));
  CHECK(select_top({5, 5, 5}, 2) == std::vector<std::size_t>({0, 1}));
  CHECK(select_top({-2, -1, -3, 4}, 3) ==
        std::vector<std::size_t>({3, 1, 0}));
  CHECK_THROWS_AS(select_top({1.0}, 2), ValidationError);
}

TEST_CASE("mock_variation schedule") {
  std::vector<double> sample = {1.0, -2.0, 0.5};
  auto none = mock_variation(sample, 0, 3, 1, 0.5, 0.8);
  CHECK(none.empty());

  auto frozen = mock_variation(sample, 4, 2, 1, 0.0, 0.8);
  for (const auto& v : frozen) CHECK(v == sample);

  // per-coordinate variance tracks s_t^2 within 5%
  const double s0 = 0.5, gamma = 0.8;
  const std::size_t round = 3;
  double expected_sd = s0 * std::pow(gamma, 3.0);
  const int draws = 10000;
  double sum = 0.0, sum2 = 0.0;
  std::size_t count = 0;
  for (int i = 0; i < draws / 4; ++i) {
    auto vars = mock_variation(sample, 4, round, 9000 + i, s0, gamma);
    for (const auto& v : vars)
      for (std::size_t c = 0; c < v.size(); ++c) {
        double delta = v[c] - sample[c];
        sum += delta;
        sum2 += delta * delta;
        ++count;
      }
  }
  double var = sum2 / count - (sum / count) * (sum / count);
  CHECK(var == Catch::Approx(expected_sd * expected_sd).epsilon(0.05));
}

TEST_CASE("pipeline validates its configuration") {
  PipelineConfig cfg;
  cfg.t = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = PipelineConfig{};
  cfg.radius = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("mock pipeline is deterministic") {
  Rng data_rng(63);
  std::vector<std::vector<double>> centers = {{2, 2}, {-2, -2}};
  auto public_items = gaussian_clusters(data_rng, centers, 10, 0.2);
  auto private_items = gaussian_clusters(data_rng, centers, 8, 0.2);

  PipelineConfig cfg;
  cfg.n_syn = 6;
  cfg.l = 3;
  cfg.t = 4;
  cfg.k = 2;
  cfg.radius = 5.0;
  cfg.seed = 77;

  MockVectorGenerator gen{2, 3.0, 0.5, 0.8};
  IdentityEmbedder emb{2, 5.0};

  auto a = run_pipeline(cfg, gen, emb, public_items, private_items);
  auto b = run_pipeline(cfg, gen, emb, public_items, private_items);
  CHECK(a.items == b.items);
  CHECK(a.report.coverage == b.report.coverage);
  CHECK(a.report.mis_selection == b.report.mis_selection);
  REQUIRE(a.report.coverage.size() == cfg.t);
  REQUIRE(a.items.size() == cfg.n_syn);

  PipelineConfig other = cfg;
  other.seed = 78;
  auto c = run_pipeline(other, gen, emb, public_items, private_items);
  CHECK(a.items != c.items);
}

TEST_CASE("noiseless selection returns candidates near the private data") {
  // private clusters sit exactly at the public cluster positions; with
  // sigma = 0 and rho = 1 the representatives point at them
  Rng data_rng(64);
  std::vector<std::vector<double>> centers = {{3, 0}, {-3, 0}};
  auto public_items = gaussian_clusters(data_rng, centers, 12, 0.1);
  auto private_items = gaussian_clusters(data_rng, centers, 10, 0.1);

  PipelineConfig cfg;
  cfg.n_syn = 2;
  cfg.l = 4;
  cfg.t = 1;
  cfg.k = 2;
  cfg.radius = 6.0;
  cfg.seed = 5;

  MockVectorGenerator gen{2, 4.0, 0.5, 0.8};
  IdentityEmbedder emb{2, 6.0};
  auto res = run_pipeline(cfg, gen, emb, public_items, private_items);
  REQUIRE(res.items.size() == 2);
  // every selected item lies near one of the clusters relative to the
  // initial box
  for (const auto& item : res.items) {
    double best = 1e300;
    for (const auto& c : centers) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < 2; ++i)
        d2 += (item[i] - c[i]) * (item[i] - c[i]);
      best = std::min(best, std::sqrt(d2));
    }
    CHECK(best < 3.0);
  }
  CHECK(res.sigma == 0.0);
}

TEST_CASE("pipeline pool size and vote conservation invariants") {
  // run a few rounds manually to watch the internal quantities
  Rng data_rng(65);
  std::vector<std::vector<double>> centers = {{1, 1, 0}, {-1, -1, 0}};
  auto public_items = gaussian_clusters(data_rng, centers, 8, 0.15);
  auto private_items = gaussian_clusters(data_rng, centers, 6, 0.15);

  PipelineConfig cfg;
  cfg.n_syn = 4;
  cfg.l = 3;
  cfg.t = 3;
  cfg.k = 2;
  cfg.radius = 4.0;
  cfg.seed = 11;

  MockVectorGenerator gen{3, 2.0, 0.4, 0.8};
  IdentityEmbedder emb{3, 4.0};

  // reproduce the pipeline's pool arithmetic
  auto pool = gen.random_samples(cfg.n_syn * cfg.l, 1);
  CHECK(pool.size() == cfg.n_syn * cfg.l);
  auto pub_emb = emb.embed(public_items);
  clip_in_place(pub_emb);
  auto summary = kmeans(pub_emb, cfg.k, 3);
  auto priv_emb = emb.embed(private_items);
  clip_in_place(priv_emb);
  std::vector<double> rhos(private_items.size(), 1.0);

  for (std::size_t round = 0; round < 2; ++round) {
    auto pool_emb = emb.embed(pool);
    clip_in_place(pool_emb);
    auto noisy = secret_clustering(summary, priv_emb, rhos, 0.5, 100 + round);
    auto hist = vote(noisy, pool_emb);
    double total_votes =
        std::accumulate(hist.votes.begin(), hist.votes.end(), 0.0);
    double total_sizes =
        std::accumulate(noisy.sizes.begin(), noisy.sizes.end(), 0.0);
    CHECK(total_votes == Catch::Approx(total_sizes).margin(1e-6));

    auto sel = select_top(hist.votes, cfg.n_syn);
    std::vector<std::vector<double>> next;
    for (std::size_t idx : sel) {
      auto vars = gen.variations(pool[idx], cfg.l, round, 55 + idx);
      next.insert(next.end(), vars.begin(), vars.end());
    }
    for (std::size_t idx : sel) next.push_back(pool[idx]);
    pool = std::move(next);
    CHECK(pool.size() == cfg.n_syn * (cfg.l + 1));
  }
}

TEST_CASE("distance evaluation counter scales with K and N, not M") {
  Rng rng(66);
  EmbeddingSet candidates(40, 2, 5.0);
  for (double& x : candidates.data) x = rng.normal();

  for (std::size_t k : {2, 4, 8}) {
    std::vector<std::vector<double>> cs(k, std::vector<double>(2, 0.0));
    auto noisy = make_noisy(cs, std::vector<double>(k, 1.0));
    auto hist = vote(noisy, candidates);
    CHECK(hist.distance_evals == k * candidates.n);
  }
}

TEST_CASE("mis-selection estimate lies in [0,1] and sigma=0 runs converge") {
  Rng data_rng(67);
  std::vector<std::vector<double>> centers = {{2, 0}, {-2, 0}};
  auto public_items = gaussian_clusters(data_rng, centers, 10, 0.1);
  auto private_items = gaussian_clusters(data_rng, centers, 8, 0.1);

  PipelineConfig cfg;
  cfg.n_syn = 6;
  cfg.l = 4;
  cfg.t = 8;
  cfg.k = 2;
  cfg.radius = 4.0;
  cfg.seed = 13;

  MockVectorGenerator gen{2, 3.0, 0.5, 0.8};
  IdentityEmbedder emb{2, 4.0};
  auto res = run_pipeline(cfg, gen, emb, public_items, private_items);
  for (double m : res.report.mis_selection) {
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
  }
  CHECK(res.report.coverage.back() < res.report.coverage.front());
}

TEST_CASE("pipeline with a budget calibrates and aborts on vacuous ones") {
  Rng data_rng(68);
  std::vector<std::vector<double>> centers = {{1, 1}, {-1, -1}};
  auto public_items = gaussian_clusters(data_rng, centers, 8, 0.1);
  auto private_items = gaussian_clusters(data_rng, centers, 5, 0.1);

  SecretIndex index(private_items.size(), {{0, 1, 2}});
  PipelineConfig cfg;
  cfg.n_syn = 3;
  cfg.l = 2;
  cfg.t = 2;
  cfg.k = 2;
  cfg.radius = 3.0;
  cfg.seed = 21;
  cfg.budget = SecretBudget::uniform(1, 1e-4, 1e-3);

  MockVectorGenerator gen{2, 2.0, 0.4, 0.8};
  IdentityEmbedder emb{2, 3.0};
  auto res = run_pipeline(cfg, gen, emb, public_items, private_items, &index);
  CHECK(res.sigma > 0.0);
  REQUIRE(res.sampling_probs.size() == private_items.size());

  SecretBudget vacuous;
  vacuous.push_back(1e-3, 1e-3);
  cfg.budget = vacuous;
  CHECK_THROWS_AS(
      run_pipeline(cfg, gen, emb, public_items, private_items, &index),
      VacuousBudgetError);

  cfg.budget = SecretBudget::uniform(1, 1e-4, 1e-3);
  CHECK_THROWS_AS(run_pipeline(cfg, gen, emb, public_items, private_items),
                  ValidationError);  // budget without an index
}

TEST_CASE("backend failures carry the round index") {
  struct FailingGenerator {
    using Item = std::vector<double>;
    std::vector<Item> random_samples(std::size_t count, std::uint64_t) const {
      return std::vector<Item>(count, Item{0.0, 0.0});
    }
    std::vector<Item> variations(const Item&, std::size_t, std::size_t,
                                 std::uint64_t) const {
      throw std::runtime_error("generator down");
    }
  };
  Rng data_rng(69);
  std::vector<std::vector<double>> centers = {{1, 0}};
  auto public_items = gaussian_clusters(data_rng, centers, 4, 0.1);
  auto private_items = gaussian_clusters(data_rng, centers, 4, 0.1);

  PipelineConfig cfg;
  cfg.n_syn = 2;
  cfg.l = 2;
  cfg.t = 3;
  cfg.k = 1;
  cfg.radius = 2.0;
  cfg.seed = 1;

  FailingGenerator gen;
  IdentityEmbedder emb{2, 2.0};
  try {
    run_pipeline(cfg, gen, emb, public_items, private_items);
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.round == 0);
  }
}

TEST_CASE("bench_vote counts and equal-size degenerate case") {
  auto res = bench_vote(200, 200, 50, 4, 9);
  CHECK(res.pointwise.distance_evals == res.representative.distance_evals);

  auto res2 = bench_vote(400, 40, 60, 4, 9);
  CHECK(res2.pointwise.distance_evals == 400u * 60u);
  CHECK(res2.representative.distance_evals == 40u * 60u);
  CHECK(res2.pointwise.distance_evals /
            res2.representative.distance_evals ==
        10u);

  // deterministic histograms
  auto res3 = bench_vote(400, 40, 60, 4, 9);
  CHECK(res2.pointwise.votes == res3.pointwise.votes);
  CHECK(res2.representative.votes == res3.representative.votes);

  CHECK_THROWS_AS(bench_vote(10, 20, 5, 2, 1), ValidationError);
}

TEST_CASE("parallel variation generation matches sequential") {
  Rng data_rng(70);
  std::vector<std::vector<double>> centers = {{1, 1}, {-1, -1}};
  auto public_items = gaussian_clusters(data_rng, centers, 8, 0.1);
  auto private_items = gaussian_clusters(data_rng, centers, 6, 0.1);

  PipelineConfig cfg;
  cfg.n_syn = 5;
  cfg.l = 3;
  cfg.t = 3;
  cfg.k = 2;
  cfg.radius = 3.0;
  cfg.seed = 99;
  cfg.threads = 1;

  MockVectorGenerator gen{2, 2.0, 0.4, 0.8};
  IdentityEmbedder emb{2, 3.0};
  auto seq = run_pipeline(cfg, gen, emb, public_items, private_items);
  cfg.threads = 4;
  auto par = run_pipeline(cfg, gen, emb, public_items, private_items);
  CHECK(seq.items == par.items);
  CHECK(seq.report.coverage == par.report.coverage);
}
