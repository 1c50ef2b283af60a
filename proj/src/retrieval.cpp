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

#include "lipool/retrieval.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "lipool/parallel.hpp"

namespace lipool {

void SearchConfig::validate() const {
  if (stages < 1 || stages > 3) throw InvalidArgument("stages must be 1, 2 or 3, got " + std::to_string(stages));
  if (top_k < 1) throw InvalidArgument("top_k must be >= 1");
  if (stages >= 2 && top_k > prefetch_k)
    throw InvalidArgument("top_k (" + std::to_string(top_k) + ") must not exceed prefetch_k (" +
                          std::to_string(prefetch_k) + ")");
  if (stages == 3 && prefetch_k > global_prefetch_k)
    throw InvalidArgument("prefetch_k (" + std::to_string(prefetch_k) + ") must not exceed global_prefetch_k (" +
                          std::to_string(global_prefetch_k) + ")");
  if (stages >= 2 && stage1_vector.empty()) throw InvalidArgument("stage1_vector must be set");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Scored {
  std::size_t index;
  float score;
};

void check_searchable(const Collection& col, const QueryEmbedding& query, std::string_view vector_name) {
  if (!col.frozen()) throw InvalidArgument("collection '" + col.name() + "' must be frozen before searching");
  query.validate();
  if (query.tokens.cols() != static_cast<Eigen::Index>(col.dim()))
    throw InvalidArgument("query '" + query.query_id + "' has d=" + std::to_string(query.tokens.cols()) +
                          ", collection d=" + std::to_string(col.dim()));
  if (!is_known_vector_name(vector_name))
    throw InvalidArgument("unknown vector name '" + std::string(vector_name) + "'");
  if (!col.all_have(vector_name))
    throw DataError("vector '" + std::string(vector_name) + "' is not stored on every page of '" + col.name() + "'");
}

// Exact MaxSim of the query against `vector_name` of each candidate record.
std::vector<Scored> score_candidates(const Collection& col, const QueryEmbedding& query,
                                     std::string_view vector_name, std::span<const std::size_t> candidates,
                                     int threads) {
  std::vector<Scored> out(candidates.size());
  parallel_for(candidates.size(), threads, [&](std::size_t begin, std::size_t end) {
    MaxSimScratch scratch;
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t idx = candidates[i];
      out[i] = {idx, maxsim(query.tokens, col.record(idx).vectors(vector_name), scratch)};
    }
  });
  return out;
}

// Keeps the best k by (score desc, page id asc).
void keep_top(const Collection& col, std::vector<Scored>& scored, std::size_t k) {
  auto better = [&](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return col.record(a.index).page_id < col.record(b.index).page_id;
  };
  k = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), better);
  scored.resize(k);
}

std::vector<std::size_t> indices_of(const std::vector<Scored>& scored) {
  std::vector<std::size_t> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back(s.index);
  return out;
}

std::vector<std::size_t> all_indices(const Collection& col) {
  std::vector<std::size_t> out(col.size());
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

RankedList to_ranked(const Collection& col, const std::vector<Scored>& scored) {
  RankedList out;
  out.reserve(scored.size());
  for (std::size_t i = 0; i < scored.size(); ++i)
    out.push_back({col.record(scored[i].index).page_id, scored[i].score, i + 1});
  return out;
}

// Runs the given cascade: each stage scores the survivors of the previous
// one and keeps its own k. The first stage sees every record.
struct StagePlan {
  std::string_view vector_name;
  std::size_t keep;
};

RankedList run_cascade(const Collection& col, const QueryEmbedding& query, std::span<const StagePlan> plan,
                       int threads, SearchTrace* trace) {
  for (const auto& stage : plan) check_searchable(col, query, stage.vector_name);
  const auto start = Clock::now();
  std::vector<std::size_t> candidates = all_indices(col);
  std::vector<Scored> scored;
  if (trace) trace->stages.clear();
  for (const auto& stage : plan) {
    const auto stage_start = Clock::now();
    scored = score_candidates(col, query, stage.vector_name, candidates, threads);
    keep_top(col, scored, stage.keep);
    candidates = indices_of(scored);
    if (trace) trace->stages.push_back({std::string(stage.vector_name), candidates, seconds_since(stage_start)});
  }
  if (trace) trace->total_seconds = seconds_since(start);
  return to_ranked(col, scored);
}

}  // namespace

RankedList search_1stage(const Collection& col, const QueryEmbedding& query, std::size_t k,
                         std::string_view vector_name, int threads, SearchTrace* trace) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  const StagePlan plan[] = {{vector_name, k}};
  return run_cascade(col, query, plan, threads, trace);
}

RankedList search_2stage(const Collection& col, const QueryEmbedding& query, const SearchConfig& cfg,
                         SearchTrace* trace) {
  SearchConfig c = cfg;
  c.stages = 2;
  c.validate();
  const StagePlan plan[] = {{c.stage1_vector, c.prefetch_k}, {vector_names::initial, c.top_k}};
  return run_cascade(col, query, plan, c.threads, trace);
}

RankedList search_3stage(const Collection& col, const QueryEmbedding& query, const SearchConfig& cfg,
                         SearchTrace* trace) {
  SearchConfig c = cfg;
  c.stages = 3;
  c.validate();
  const StagePlan plan[] = {{vector_names::global_pooling, c.global_prefetch_k},
                            {c.stage1_vector, c.prefetch_k},
                            {vector_names::initial, c.top_k}};
  return run_cascade(col, query, plan, c.threads, trace);
}

RankedList search(const Collection& col, const QueryEmbedding& query, const SearchConfig& cfg, SearchTrace* trace) {
  cfg.validate();
  switch (cfg.stages) {
    case 1:
      return search_1stage(col, query, cfg.top_k, vector_names::initial, cfg.threads, trace);
    case 2:
      return search_2stage(col, query, cfg, trace);
    default:
      return search_3stage(col, query, cfg, trace);
  }
}

QpsReport measure_qps(const Collection& col, std::span<const QueryEmbedding> queries, const SearchConfig& cfg,
                      int repeats, int clients) {
  if (queries.empty()) throw InvalidArgument("measure_qps needs at least one query");
  if (repeats < 1) throw InvalidArgument("repeats must be >= 1");
  cfg.validate();
  clients = std::max(1, clients);

  struct Run {
    double seconds = 0.0;
    std::vector<double> stage_seconds;
    std::vector<std::string> stage_names;
  };

  auto one_pass = [&]() {
    Run run;
    std::vector<SearchTrace> traces(queries.size());
    const auto start = Clock::now();
    parallel_for(queries.size(), clients, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) search(col, queries[i], cfg, &traces[i]);
    });
    run.seconds = seconds_since(start);
    for (const auto& t : traces) {
      run.stage_seconds.resize(t.stages.size(), 0.0);
      run.stage_names.resize(t.stages.size());
      for (std::size_t s = 0; s < t.stages.size(); ++s) {
        run.stage_seconds[s] += t.stages[s].seconds;
        run.stage_names[s] = t.stages[s].vector_name;
      }
    }
    return run;
  };

  one_pass();  // warmup
  std::vector<Run> runs;
  for (int r = 0; r < repeats; ++r) runs.push_back(one_pass());
  std::vector<std::size_t> order(runs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return runs[a].seconds < runs[b].seconds; });
  const Run& median = runs[order[order.size() / 2]];

  QpsReport report;
  report.queries = queries.size();
  report.clients = clients;
  report.median_batch_seconds = median.seconds;
  report.qps = median.seconds > 0.0 ? static_cast<double>(queries.size()) / median.seconds : 0.0;
  for (const auto& r : runs) report.run_qps.push_back(r.seconds > 0.0 ? queries.size() / r.seconds : 0.0);
  for (std::size_t s = 0; s < median.stage_seconds.size(); ++s)
    report.stages.push_back({median.stage_names[s], median.stage_seconds[s] / static_cast<double>(queries.size())});
  return report;
}

}  // namespace lipool
