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

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lipool/retrieval.hpp"

namespace lipool {

/// page id -> relevance grade (>= 0) for one query.
using QueryQrels = std::map<std::string, int, std::less<>>;

/// query id -> judgments.
using QrelSet = std::map<std::string, QueryQrels, std::less<>>;

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Fraction of relevant pages (grade > 0) found in the top k. std::nullopt
/// when the query has no relevant page; such queries are left out of means.
std::optional<double> recall_at_k(const RankedList& run, const QueryQrels& qrels, std::size_t k);

/// Exponential-gain NDCG: DCG = sum (2^g - 1) / log2(i + 1) over ranks
/// i = 1..k, normalized by the DCG of the grade-sorted ideal ranking.
std::optional<double> ndcg_at_k(const RankedList& run, const QueryQrels& qrels, std::size_t k);

inline constexpr std::array<std::size_t, 3> kCutoffs = {5, 10, 100};

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

enum class EvalScope { per_dataset, union_all };

std::string_view to_string(EvalScope scope);
EvalScope parse_eval_scope(std::string_view name);

struct QueryResult {
  std::string query_id;
  std::string dataset_id;
  std::map<std::string, double> metrics;  // "ndcg@5", "recall@10", ...
};

struct SkippedQuery {
  std::string query_id;
  std::string reason;
};

struct EvalOptions {
  bool measure_qps = true;
  int qps_repeats = 3;
  int qps_clients = 1;
  int threads = 1;  // parallel queries during metric runs; 0 = all cores
  std::uint64_t seed = 0;  // echoed in reports
};

struct EvalReport {
  EvalScope scope = EvalScope::per_dataset;
  std::string collection;
  std::size_t pages = 0;
  SearchConfig config;
  std::map<std::string, double> means;
  std::map<std::string, std::map<std::string, double>> per_dataset_means;  // query dataset -> means
  std::vector<QueryResult> queries;
  std::vector<SkippedQuery> skipped;
  std::optional<QpsReport> qps;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, RankedList>> runs;  // not serialized

  /// Serializes everything except runs. Timing fields live under "timing".
  nlohmann::json to_json() const;
};

/// Metric key like "ndcg@10".
std::string metric_key(std::string_view metric, std::size_t k);

/// Runs and scores every query against its collection(s).
///   per_dataset  each query searches the collection whose dataset matches
///                query.dataset_id; one report per collection
///   union_all    all collections merged (ids prefixed on collision); one
///                report, plus per-dataset means over the same run
std::vector<EvalReport> evaluate(std::span<const Collection> collections, std::span<const QueryEmbedding> queries,
                                 const QrelSet& qrels, const SearchConfig& cfg, EvalScope scope,
                                 const EvalOptions& options = {});

/// Scores already-computed runs against one collection.
EvalReport score_runs(const Collection& col, std::span<const QueryEmbedding> queries,
                      std::vector<RankedList> runs, const QrelSet& qrels, const SearchConfig& cfg);

/// Dataset a collection serves: its records' dataset id, else its name.
std::string dataset_of(const Collection& col);

/// Table with columns N@5 N@10 R@5 R@10 R@100 QPS. When `baseline` is
/// given, each value is followed by its signed delta (".559+.01").
std::string format_metrics_row(const std::string& label, const std::map<std::string, double>& means,
                               std::optional<double> qps, const std::map<std::string, double>* baseline = nullptr);
std::string metrics_table_header();

// ---------------------------------------------------------------------------
// Search cost model
// ---------------------------------------------------------------------------

struct CostVariant {
  std::string label;
  std::uint64_t full_vectors = 0;    // D
  std::uint64_t pooled_vectors = 0;  // D'
};

struct CostRow {
  std::string label;
  std::uint64_t full_vectors = 0;
  std::uint64_t pooled_vectors = 0;
  std::uint64_t full_multiply_adds = 0;
  std::uint64_t pooled_multiply_adds = 0;
  double ratio = 0.0;  // D / D'
};

/// Multiply-add counts Q*D*N*d for full and pooled scans of each variant.
std::vector<CostRow> cost_report(std::uint64_t dim, std::uint64_t n_pages, std::uint64_t query_tokens,
                                 std::span<const CostVariant> variants);

}  // namespace lipool
