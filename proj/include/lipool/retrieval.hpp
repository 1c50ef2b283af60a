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

#pragma once

// Multi-stage MaxSim search over a frozen collection.
//
//   1 stage   exact MaxSim on one named vector (normally `initial`)
//   2 stages  prefetch_k by MaxSim on a pooled vector, rerank on `initial`
//   3 stages  global_prefetch_k by `global_pooling`, then as 2 stages
//
// Every ranking is ordered by score descending, then page id ascending.
// Returned scores always come from the last (exact) stage.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lipool/scoring.hpp"
#include "lipool/store.hpp"

namespace lipool {

struct SearchConfig {
  int stages = 2;
  std::string stage1_vector = std::string(vector_names::mean_pooling);
  std::size_t prefetch_k = 256;
  std::size_t global_prefetch_k = 1024;
  std::size_t top_k = 100;
  int threads = 1;  // per-query scoring threads; 0 = all cores

  /// Throws InvalidArgument unless stages in {1,2,3}, top_k >= 1 and
  /// top_k <= prefetch_k <= global_prefetch_k where those stages apply.
  void validate() const;
};

struct RankedHit {
  std::string page_id;
  float score = 0.0f;
  std::size_t rank = 0;  // 1-based
  bool operator==(const RankedHit&) const = default;
};

using RankedList = std::vector<RankedHit>;

struct StageTrace {
  std::string vector_name;
  std::vector<std::size_t> candidates;  // record indices kept, best first
  double seconds = 0.0;
};

struct SearchTrace {
  std::vector<StageTrace> stages;
  double total_seconds = 0.0;
};

RankedList search_1stage(const Collection& col, const QueryEmbedding& query, std::size_t k,
                         std::string_view vector_name = vector_names::initial, int threads = 1,
                         SearchTrace* trace = nullptr);

RankedList search_2stage(const Collection& col, const QueryEmbedding& query, const SearchConfig& cfg,
                         SearchTrace* trace = nullptr);

RankedList search_3stage(const Collection& col, const QueryEmbedding& query, const SearchConfig& cfg,
                         SearchTrace* trace = nullptr);

/// Dispatches on cfg.stages.
RankedList search(const Collection& col, const QueryEmbedding& query, const SearchConfig& cfg,
                  SearchTrace* trace = nullptr);

struct StageLatency {
  std::string vector_name;
  double mean_seconds = 0.0;  // per query
};

struct QpsReport {
  double qps = 0.0;                   // median over repeats
  double median_batch_seconds = 0.0;  // wall clock of one pass over all queries
  std::vector<double> run_qps;
  std::vector<StageLatency> stages;   // from the median run
  std::size_t queries = 0;
  int clients = 1;
};

/// Runs one untimed warmup pass, then `repeats` timed passes over all
/// queries. With clients > 1, queries are split across that many threads.
QpsReport measure_qps(const Collection& col, std::span<const QueryEmbedding> queries, const SearchConfig& cfg,
                      int repeats = 3, int clients = 1);

}  // namespace lipool
