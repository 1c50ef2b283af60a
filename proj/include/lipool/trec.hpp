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

// TREC-style text formats.
//   qrels  query_id 0 page_id grade
//   run    query_id Q0 page_id rank score run_tag

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lipool/eval.hpp"

namespace lipool {

QrelSet parse_qrels(std::string_view text);
std::string format_qrels(const QrelSet& qrels);
QrelSet read_qrels(const std::filesystem::path& path);
void write_qrels(const std::filesystem::path& path, const QrelSet& qrels);

std::string format_trec_run(std::string_view query_id, const RankedList& run, std::string_view run_tag);

/// query id -> ranked list, in file order of first appearance.
std::vector<std::pair<std::string, RankedList>> parse_trec_run(std::string_view text);

/// One JSON object per query: ids, hits and per-stage timings.
nlohmann::json run_jsonl_record(std::string_view query_id, const RankedList& run, const SearchTrace& trace,
                                const Collection& col);

}  // namespace lipool
