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

#include <cmath>

#include "corpus.hpp"
#include "lipool/eval.hpp"
#include "lipool/trec.hpp"
#include "oracles.hpp"

using namespace lipool;

namespace {

RankedList ranking(std::initializer_list<const char*> ids) {
  RankedList run;
  std::size_t rank = 0;
  for (auto id : ids) run.push_back({id, float(10 - rank), ++rank});
  return run;
}

}  // namespace

TEST_CASE("single relevant page at rank two") {
  const QueryQrels qrels{{"b", 1}};
  const auto run = ranking({"a", "b", "c"});
  CHECK(std::abs(*ndcg_at_k(run, qrels, 10) - 1.0 / std::log2(3.0)) < 1e-12);
  CHECK(*recall_at_k(run, qrels, 1) == 0.0);
  CHECK(*recall_at_k(run, qrels, 2) == 1.0);
}

TEST_CASE("graded ndcg matches the oracle") {
  const QueryQrels qrels{{"a", 2}, {"c", 1}, {"x", 3}, {"zero", 0}};
  const std::map<std::string, int> grades{{"a", 2}, {"c", 1}, {"x", 3}, {"zero", 0}};
  const auto run = ranking({"c", "zero", "a", "q", "x"});
  const std::vector<std::string> ids{"c", "zero", "a", "q", "x"};
  for (std::size_t k : {1, 3, 5, 10})
    CHECK(std::abs(*ndcg_at_k(run, qrels, k) - oracle::ndcg(ids, grades, k)) < 1e-12);
  CHECK(std::abs(*recall_at_k(run, qrels, 3) - 2.0 / 3.0) < 1e-12);
}

TEST_CASE("queries without relevant pages are undefined") {
  CHECK_FALSE(ndcg_at_k(ranking({"a"}), QueryQrels{{"a", 0}}, 5));
  CHECK_FALSE(recall_at_k(ranking({"a"}), QueryQrels{}, 5));
  CHECK(*ndcg_at_k(RankedList{}, QueryQrels{{"a", 1}}, 5) == 0.0);
}

TEST_CASE("qrels and run text formats") {
  const QrelSet q = parse_qrels("# header\nq1 0 p1 1\nq1 0 p2 0\nq2\t0\tp9\t2\n");
  CHECK(q.at("q1").at("p1") == 1);
  CHECK(q.at("q2").at("p9") == 2);
  CHECK(parse_qrels(format_qrels(q)) == q);
  CHECK_THROWS_AS(parse_qrels("q1 0 p1\n"), DataError);
  CHECK_THROWS_AS(parse_qrels("q1 0 p1 x\n"), DataError);

  const auto run = ranking({"a", "b"});
  const std::string text = format_trec_run("q7", run, "tag");
  CHECK(text == "q7 Q0 a 1 10.000000 tag\nq7 Q0 b 2 9.000000 tag\n");
  const auto parsed = parse_trec_run(text);
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].second[1].page_id == "b");
}

TEST_CASE("evaluation over synthetic datasets") {
  SyntheticSpec s;
  s.n_pages = 60;
  s.n_datasets = 2;
  s.dim = 32;
  s.layout = FixedGrid{6, 6};
  s.n_queries = 8;
  s.query_tokens = 5;
  s.noise = 0.0;
  const SyntheticCorpus gen(s);
  std::vector<Collection> cols;
  for (std::size_t d = 0; d < 2; ++d) cols.push_back(corpus::build(gen, d, corpus::bare_profile(32)));
  const auto queries = gen.queries();
  SearchConfig cfg;
  cfg.stages = 1;
  cfg.top_k = 50;
  EvalOptions opts;
  opts.measure_qps = false;

  const auto per = evaluate(cols, queries, gen.qrels(), cfg, EvalScope::per_dataset, opts);
  REQUIRE(per.size() == 2);
  for (const auto& r : per) {
    CHECK(r.queries.size() == 8);
    CHECK(r.means.at("recall@5") == 1.0);
    CHECK_FALSE(r.qps);
  }

  const auto uni = evaluate(cols, queries, gen.qrels(), cfg, EvalScope::union_all, opts);
  REQUIRE(uni.size() == 1);
  CHECK(uni[0].pages == 120);
  CHECK(uni[0].queries.size() == 16);
  CHECK(uni[0].skipped.empty());
  CHECK(uni[0].per_dataset_means.size() == 2);
  CHECK(uni[0].means.at("ndcg@10") == 1.0);

  const auto j = uni[0].to_json();
  CHECK(j.contains("means"));
  CHECK_FALSE(j.contains("timing"));
}

TEST_CASE("queries with unresolvable qrels are skipped") {
  SyntheticSpec s;
  s.n_pages = 10;
  s.dim = 16;
  s.layout = FixedGrid{2, 2};
  s.n_queries = 2;
  const SyntheticCorpus gen(s);
  const auto col = corpus::build(gen, 0, corpus::bare_profile(16));
  QrelSet qrels = gen.qrels();
  qrels.begin()->second = {{"ghost", 1}};
  SearchConfig cfg;
  cfg.stages = 1;
  cfg.top_k = 5;
  std::vector<RankedList> runs;
  const auto queries = gen.queries();
  for (const auto& q : queries) runs.push_back(search(col, q, cfg));
  const auto rep = score_runs(col, queries, runs, qrels, cfg);
  CHECK(rep.queries.size() == 1);
  CHECK(rep.skipped.size() == 1);
}

TEST_CASE("metrics rows show signed deltas") {
  const std::map<std::string, double> base{{"ndcg@5", 0.55}, {"ndcg@10", 0.6}, {"recall@5", 0.7},
                                           {"recall@10", 0.8}, {"recall@100", 0.9}};
  auto now = base;
  now["ndcg@5"] = 0.559;
  now["recall@10"] = 0.71;
  const std::string row = format_metrics_row("x", now, 12.5, &base);
  CHECK(row.find(".559+.01") != std::string::npos);
  CHECK(row.find(".710-.09") != std::string::npos);
}

TEST_CASE("cost report") {
  const std::vector<CostVariant> v{{"colpali", 1024, 32}, {"colsmol", 832, 13}};
  const auto rows = cost_report(128, 10000, 10, v);
  CHECK(rows[0].full_multiply_adds == 13'107'200'000ULL);
  CHECK(rows[0].pooled_multiply_adds == 409'600'000ULL);
  CHECK(rows[0].ratio == 32.0);
  CHECK(rows[1].ratio == 64.0);
}
