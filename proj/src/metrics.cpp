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
#include <cmath>
#include <cstdio>
#include <functional>

#include "lipool/eval.hpp"

namespace lipool {

namespace {

std::size_t relevant_count(const QueryQrels& qrels) {
  return static_cast<std::size_t>(std::count_if(qrels.begin(), qrels.end(), [](const auto& e) { return e.second > 0; }));
}

int grade_of(const QueryQrels& qrels, const std::string& page_id) {
  auto it = qrels.find(page_id);
  return it == qrels.end() ? 0 : it->second;
}

double gain(int grade) { return std::exp2(static_cast<double>(grade)) - 1.0; }

}  // namespace

std::optional<double> recall_at_k(const RankedList& run, const QueryQrels& qrels, std::size_t k) {
  const std::size_t relevant = relevant_count(qrels);
  if (relevant == 0) return std::nullopt;
  std::size_t found = 0;
  for (std::size_t i = 0; i < std::min(k, run.size()); ++i)
    if (grade_of(qrels, run[i].page_id) > 0) ++found;
  return static_cast<double>(found) / static_cast<double>(relevant);
}

std::optional<double> ndcg_at_k(const RankedList& run, const QueryQrels& qrels, std::size_t k) {
  if (relevant_count(qrels) == 0) return std::nullopt;
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, run.size()); ++i)
    dcg += gain(grade_of(qrels, run[i].page_id)) / std::log2(static_cast<double>(i) + 2.0);

  std::vector<int> grades;
  for (const auto& [page, g] : qrels)
    if (g > 0) grades.push_back(g);
  std::sort(grades.begin(), grades.end(), std::greater<>());
  double ideal = 0.0;
  for (std::size_t i = 0; i < std::min(k, grades.size()); ++i)
    ideal += gain(grades[i]) / std::log2(static_cast<double>(i) + 2.0);
  return dcg / ideal;
}

std::string metric_key(std::string_view metric, std::size_t k) {
  return std::string(metric) + "@" + std::to_string(k);
}

namespace {

// ".551", "1.000"
std::string short_decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s.rfind("0.", 0) == 0) s.erase(0, 1);
  if (s.rfind("-0.", 0) == 0) s.erase(1, 1);
  return s;
}

// "+.01", " .00", "-.09"
std::string short_delta(double d) {
  char buf[32];
  const double rounded = std::round(d * 100.0) / 100.0;
  if (rounded == 0.0) return " .00";
  std::snprintf(buf, sizeof buf, "%+.2f", rounded);
  std::string s = buf;
  if (s.size() > 2 && s[1] == '0' && s[2] == '.') s.erase(1, 1);
  return s;
}

struct Column {
  const char* header;
  const char* metric;
  std::size_t k;
};

constexpr Column kColumns[] = {
    {"N@5", "ndcg", 5}, {"N@10", "ndcg", 10}, {"R@5", "recall", 5}, {"R@10", "recall", 10}, {"R@100", "recall", 100},
};

}  // namespace

std::string metrics_table_header() {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-28s %-9s %-9s %-9s %-9s %-9s %8s", "run", "N@5", "N@10", "R@5", "R@10", "R@100",
                "QPS");
  return buf;
}

std::string format_metrics_row(const std::string& label, const std::map<std::string, double>& means,
                               std::optional<double> qps, const std::map<std::string, double>* baseline) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-28s", label.c_str());
  std::string row = buf;
  for (const auto& col : kColumns) {
    const auto key = metric_key(col.metric, col.k);
    auto it = means.find(key);
    std::string cell = it == means.end() ? "-" : short_decimal(it->second);
    if (baseline && it != means.end()) {
      if (auto b = baseline->find(key); b != baseline->end()) cell += short_delta(it->second - b->second);
    }
    std::snprintf(buf, sizeof buf, " %-9s", cell.c_str());
    row += buf;
  }
  if (qps) {
    std::snprintf(buf, sizeof buf, " %8.2f", *qps);
  } else {
    std::snprintf(buf, sizeof buf, " %8s", "-");
  }
  row += buf;
  return row;
}

std::vector<CostRow> cost_report(std::uint64_t dim, std::uint64_t n_pages, std::uint64_t query_tokens,
                                 std::span<const CostVariant> variants) {
  std::vector<CostRow> rows;
  for (const auto& v : variants) {
    CostRow row;
    row.label = v.label;
    row.full_vectors = v.full_vectors;
    row.pooled_vectors = v.pooled_vectors;
    row.full_multiply_adds = count_multiply_adds(query_tokens, v.full_vectors, n_pages, dim);
    row.pooled_multiply_adds = count_multiply_adds(query_tokens, v.pooled_vectors, n_pages, dim);
    row.ratio = static_cast<double>(v.full_vectors) / static_cast<double>(v.pooled_vectors);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace lipool
