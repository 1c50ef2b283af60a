// Copyright 2026 The lipool Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "corpus.hpp"
#include "lipool/retrieval.hpp"
#include "oracles.hpp"

using namespace lipool;

namespace {

struct Fixture {
  SyntheticCorpus gen;
  Collection col;
  std::vector<QueryEmbedding> queries;

  static SyntheticSpec spec() {
    SyntheticSpec s;
    s.n_pages = 120;
    s.dim = 32;
    s.layout = FixedGrid{8, 8};
    s.n_topics = 6;
    s.n_queries = 15;
    s.query_tokens = 6;
    s.noise = 0.6;
    s.seed = 9;
    return s;
  }
  static PoolingOptions pooling() {
    PoolingOptions p;
    p.smoothing = SmoothingMode::conv1d;
    return p;
  }
  Fixture()
      : gen(spec()), col(corpus::build(gen, 0, corpus::bare_profile(32), pooling())), queries(gen.queries()) {}
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_CASE("one-stage search equals a brute-force ranking") {
  const auto& f = fixture();
  for (const auto& q : f.queries) {
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& r : f.col.records())
      scored.emplace_back(oracle::maxsim(oracle::to_rows(q.tokens), oracle::to_rows(r.vectors("initial"))), r.page_id);
    std::sort(scored.begin(), scored.end(), [](auto& a, auto& b) { return a.first > b.first; });
    const auto run = search_1stage(f.col, q, 10);
    REQUIRE(run.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(run[i].rank == i + 1);
      CHECK(std::abs(run[i].score - scored[i].first) <= 1e-5 * std::abs(scored[i].first));
    }
    CHECK(run[0].page_id == scored[0].second);
  }
}

TEST_CASE("full prefetch reproduces one-stage results exactly") {
  const auto& f = fixture();
  SearchConfig cfg;
  cfg.top_k = 20;
  cfg.prefetch_k = f.col.size();
  for (const auto& q : f.queries) {
    const auto one = search_1stage(f.col, q, 20);
    const auto two = search_2stage(f.col, q, cfg);
    REQUIRE(one.size() == two.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
      CHECK(one[i].page_id == two[i].page_id);
      CHECK(one[i].score == two[i].score);
    }
  }
}

TEST_CASE("cascade stages are nested and traced") {
  const auto& f = fixture();
  SearchConfig cfg;
  cfg.stages = 3;
  cfg.global_prefetch_k = 60;
  cfg.prefetch_k = 25;
  cfg.top_k = 5;
  cfg.stage1_vector = "smoothed";
  SearchTrace trace;
  const auto run = search(f.col, f.queries[0], cfg, &trace);
  REQUIRE(trace.stages.size() == 3);
  CHECK(trace.stages[0].vector_name == "global_pooling");
  CHECK(trace.stages[1].vector_name == "smoothed");
  CHECK(trace.stages[2].vector_name == "initial");
  CHECK(trace.stages[0].candidates.size() == 60);
  CHECK(trace.stages[1].candidates.size() == 25);
  CHECK(run.size() == 5);
  for (std::size_t s = 1; s < 3; ++s)
    for (auto c : trace.stages[s].candidates)
      CHECK(std::find(trace.stages[s - 1].candidates.begin(), trace.stages[s - 1].candidates.end(), c) !=
            trace.stages[s - 1].candidates.end());
}

TEST_CASE("ties break by page id") {
  Collection col("c", 2);
  MatrixF same(1, 2);
  same << 1, 0;
  for (auto id : {"c", "a", "b"})
    col.insert(id, "", {{"initial", same}, {"mean_pooling", same}, {"global_pooling", same}});
  col.freeze();
  const auto run = search_1stage(col, QueryEmbedding{"q", "", same}, 3);
  CHECK(run[0].page_id == "a");
  CHECK(run[1].page_id == "b");
  CHECK(run[2].page_id == "c");
}

TEST_CASE("search preconditions") {
  const auto& f = fixture();
  SearchConfig cfg;
  cfg.top_k = 300;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.stages = 4;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.stage1_vector = "pooled";
  CHECK_THROWS_AS(search(f.col, f.queries[0], cfg), InvalidArgument);

  Collection open("o", 32);
  CHECK_THROWS_AS(search_1stage(open, f.queries[0], 3), Error);
  QueryEmbedding wrong{"q", "", MatrixF::Ones(2, 16)};
  CHECK_THROWS_AS(search_1stage(f.col, wrong, 3), InvalidArgument);
}

TEST_CASE("k larger than the collection returns every page") {
  const auto& f = fixture();
  CHECK(search_1stage(f.col, f.queries[0], 1000).size() == f.col.size());
}

TEST_CASE("threaded scoring gives identical lists") {
  const auto& f = fixture();
  SearchConfig a, b;
  a.prefetch_k = b.prefetch_k = 30;
  a.top_k = b.top_k = 10;
  b.threads = 3;
  for (const auto& q : f.queries) {
    const auto x = search(f.col, q, a), y = search(f.col, q, b);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK((x[i].page_id == y[i].page_id && x[i].score == y[i].score));
  }
}

TEST_CASE("qps report shape") {
  const auto& f = fixture();
  SearchConfig cfg;
  cfg.prefetch_k = 30;
  cfg.top_k = 10;
  const auto rep = measure_qps(f.col, f.queries, cfg, 2, 2);
  CHECK(rep.qps > 0);
  CHECK(rep.run_qps.size() == 2);
  CHECK(rep.queries == f.queries.size());
  REQUIRE(rep.stages.size() == 2);
  CHECK(rep.stages[0].vector_name == "mean_pooling");
}
