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

#include <algorithm>

#include "lipool/config.hpp"
#include "lipool/eval.hpp"
#include "lipool/parallel.hpp"

namespace lipool {

std::string_view to_string(EvalScope scope) {
  return scope == EvalScope::per_dataset ? "per_dataset" : "union";
}

EvalScope parse_eval_scope(std::string_view name) {
  if (name == "per_dataset" || name == "per-dataset") return EvalScope::per_dataset;
  if (name == "union") return EvalScope::union_all;
  throw InvalidArgument("unknown eval scope '" + std::string(name) + "' (expected per_dataset or union)");
}

std::string dataset_of(const Collection& col) {
  if (!col.empty() && !col.record(0).dataset_id.empty()) return col.record(0).dataset_id;
  return col.name();
}

namespace {

std::map<std::string, double> mean_of(const std::vector<const QueryResult*>& results) {
  std::map<std::string, double> sums;
  for (const auto* r : results)
    for (const auto& [key, v] : r->metrics) sums[key] += v;
  for (auto& [key, v] : sums) v /= static_cast<double>(results.size());
  return sums;
}

std::vector<RankedList> run_queries(const Collection& col, std::span<const QueryEmbedding> queries,
                                    const SearchConfig& cfg, int threads) {
  std::vector<RankedList> runs(queries.size());
  SearchConfig per_query = cfg;
  per_query.threads = 1;
  parallel_for(queries.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) runs[i] = search(col, queries[i], per_query);
  });
  return runs;
}

}  // namespace

EvalReport score_runs(const Collection& col, std::span<const QueryEmbedding> queries, std::vector<RankedList> runs,
                      const QrelSet& qrels, const SearchConfig& cfg) {
  if (runs.size() != queries.size()) throw InvalidArgument("score_runs: one run per query required");
  EvalReport report;
  report.collection = col.name();
  report.pages = col.size();
  report.config = cfg;

  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& q = queries[i];
    report.runs.emplace_back(q.query_id, runs[i]);

    auto judged = qrels.find(q.query_id);
    if (judged == qrels.end()) {
      report.skipped.push_back({q.query_id, "no qrels for query"});
      continue;
    }
    // Map judgments into the collection's id space (union ids may be prefixed).
    QueryQrels resolved;
    std::string unresolved;
    for (const auto& [page, grade] : judged->second) {
      const auto idx = col.resolve(q.dataset_id, page);
      if (idx < 0) {
        if (grade > 0) unresolved = page;
        continue;
      }
      resolved[col.record(static_cast<std::size_t>(idx)).page_id] = grade;
    }
    if (!unresolved.empty()) {
      report.skipped.push_back({q.query_id, "relevant page '" + unresolved + "' not found in '" + col.name() + "'"});
      continue;
    }

    QueryResult result{q.query_id, q.dataset_id, {}};
    bool scored = true;
    for (std::size_t k : kCutoffs) {
      auto ndcg = ndcg_at_k(runs[i], resolved, k);
      auto recall = recall_at_k(runs[i], resolved, k);
      if (!ndcg || !recall) {
        scored = false;
        break;
      }
      result.metrics[metric_key("ndcg", k)] = *ndcg;
      result.metrics[metric_key("recall", k)] = *recall;
    }
    if (!scored) {
      report.skipped.push_back({q.query_id, "no relevant pages"});
      continue;
    }
    report.queries.push_back(std::move(result));
  }

  std::vector<const QueryResult*> all;
  std::map<std::string, std::vector<const QueryResult*>> by_dataset;
  for (const auto& r : report.queries) {
    all.push_back(&r);
    by_dataset[r.dataset_id].push_back(&r);
  }
  if (!all.empty()) report.means = mean_of(all);
  for (const auto& [ds, results] : by_dataset) report.per_dataset_means[ds] = mean_of(results);
  return report;
}

std::vector<EvalReport> evaluate(std::span<const Collection> collections, std::span<const QueryEmbedding> queries,
                                 const QrelSet& qrels, const SearchConfig& cfg, EvalScope scope,
                                 const EvalOptions& options) {
  if (collections.empty()) throw InvalidArgument("evaluate needs at least one collection");
  cfg.validate();

  auto evaluate_one = [&](const Collection& col, std::span<const QueryEmbedding> qs) {
    EvalReport report = score_runs(col, qs, run_queries(col, qs, cfg, options.threads), qrels, cfg);
    report.scope = scope;
    report.seed = options.seed;
    if (options.measure_qps && !qs.empty())
      report.qps = measure_qps(col, qs, cfg, options.qps_repeats, options.qps_clients);
    return report;
  };

  std::vector<EvalReport> reports;
  if (scope == EvalScope::union_all) {
    const Collection merged = merge(collections, "union");
    reports.push_back(evaluate_one(merged, queries));
    return reports;
  }

  std::vector<bool> assigned(queries.size(), false);
  for (const auto& col : collections) {
    const std::string ds = dataset_of(col);
    std::vector<QueryEmbedding> mine;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      if (queries[i].dataset_id == ds || (collections.size() == 1 && queries[i].dataset_id.empty())) {
        mine.push_back(queries[i]);
        assigned[i] = true;
      }
    }
    reports.push_back(evaluate_one(col, mine));
  }
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (!assigned[i])
      reports.front().skipped.push_back(
          {queries[i].query_id, "no collection for dataset '" + queries[i].dataset_id + "'"});
  }
  return reports;
}

nlohmann::json EvalReport::to_json() const {
  using nlohmann::json;
  json j;
  j["scope"] = std::string(lipool::to_string(scope));
  j["collection"] = collection;
  j["pages"] = pages;
  j["config"] = lipool::to_json(config);
  j["seed"] = seed;
  j["means"] = means;
  j["per_dataset_means"] = per_dataset_means;
  j["evaluated_queries"] = queries.size();
  json per_query = json::array();
  for (const auto& q : queries)
    per_query.push_back({{"query_id", q.query_id}, {"dataset_id", q.dataset_id}, {"metrics", q.metrics}});
  j["queries"] = per_query;
  json skipped_json = json::array();
  for (const auto& s : skipped) skipped_json.push_back({{"query_id", s.query_id}, {"reason", s.reason}});
  j["skipped"] = skipped_json;
  if (qps) {
    json stages = json::array();
    for (const auto& s : qps->stages) stages.push_back({{"vector", s.vector_name}, {"mean_seconds", s.mean_seconds}});
    j["timing"] = {{"qps", qps->qps},
                   {"median_batch_seconds", qps->median_batch_seconds},
                   {"run_qps", qps->run_qps},
                   {"clients", qps->clients},
                   {"stages", stages}};
  }
  return j;
}

}  // namespace lipool
