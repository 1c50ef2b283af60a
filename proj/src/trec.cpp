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

#include "lipool/trec.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "lipool/binary_io.hpp"

namespace lipool {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <class F>
void for_each_line(std::string_view text, F&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    fn(text.substr(0, nl), line_no);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

}  // namespace

QrelSet parse_qrels(std::string_view text) {
  QrelSet qrels;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto fields = split_ws(line);
    if (fields.empty() || fields[0].front() == '#') return;
    if (fields.size() != 4)
      throw DataError("qrels line " + std::to_string(line_no) + ": expected 4 fields, got " +
                      std::to_string(fields.size()));
    int grade = 0;
    const auto [ptr, ec] = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), grade);
    if (ec != std::errc() || ptr != fields[3].data() + fields[3].size() || grade < 0)
      throw DataError("qrels line " + std::to_string(line_no) + ": grade must be a non-negative integer");
    qrels[std::string(fields[0])][std::string(fields[2])] = grade;
  });
  return qrels;
}

std::string format_qrels(const QrelSet& qrels) {
  std::string out;
  for (const auto& [query, pages] : qrels)
    for (const auto& [page, grade] : pages) out += query + " 0 " + page + " " + std::to_string(grade) + "\n";
  return out;
}

QrelSet read_qrels(const std::filesystem::path& path) { return parse_qrels(io::read_file(path)); }

void write_qrels(const std::filesystem::path& path, const QrelSet& qrels) {
  io::write_file(path, format_qrels(qrels));
}

std::string format_trec_run(std::string_view query_id, const RankedList& run, std::string_view run_tag) {
  std::string out;
  char score[32];
  for (const auto& hit : run) {
    std::snprintf(score, sizeof score, "%.6f", static_cast<double>(hit.score));
    out.append(query_id).append(" Q0 ").append(hit.page_id).append(" ").append(std::to_string(hit.rank));
    out.append(" ").append(score).append(" ").append(run_tag).append("\n");
  }
  return out;
}

std::vector<std::pair<std::string, RankedList>> parse_trec_run(std::string_view text) {
  std::vector<std::pair<std::string, RankedList>> runs;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto fields = split_ws(line);
    if (fields.empty()) return;
    if (fields.size() != 6)
      throw DataError("run line " + std::to_string(line_no) + ": expected 6 fields, got " +
                      std::to_string(fields.size()));
    RankedHit hit;
    hit.page_id = std::string(fields[2]);
    hit.rank = std::stoul(std::string(fields[3]));
    hit.score = std::stof(std::string(fields[4]));
    if (runs.empty() || runs.back().first != fields[0]) runs.emplace_back(std::string(fields[0]), RankedList{});
    runs.back().second.push_back(std::move(hit));
  });
  return runs;
}

nlohmann::json run_jsonl_record(std::string_view query_id, const RankedList& run, const SearchTrace& trace,
                                const Collection& col) {
  using nlohmann::json;
  json hits = json::array();
  for (const auto& h : run) hits.push_back({{"page_id", h.page_id}, {"rank", h.rank}, {"score", h.score}});
  json stages = json::array();
  for (const auto& s : trace.stages) {
    json candidates = json::array();
    for (auto idx : s.candidates) candidates.push_back(col.record(idx).page_id);
    stages.push_back({{"vector", s.vector_name},
                      {"kept", s.candidates.size()},
                      {"seconds", s.seconds},
                      {"candidates", candidates}});
  }
  return {{"query_id", query_id}, {"hits", hits}, {"stages", stages}, {"total_seconds", trace.total_seconds}};
}

}  // namespace lipool
