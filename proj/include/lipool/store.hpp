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

// In-memory page collection with named FP16 vectors.
//
// Collections are built, frozen, then searched; there are no updates or
// deletes. Iteration order is insertion order.
//
// Index file ("LIX1", little-endian):
//   header   magic | version u32 | d u32 | page_count u64
//   per page id_len u32 | id | dataset_len u32 | dataset | nv_count u8
//            per named vector: name_len u8 | name | count u32 | count*d f16

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lipool/core.hpp"
#include "lipool/pooling.hpp"

namespace lipool {

struct PageRecord {
  std::string page_id;
  std::string dataset_id;
  std::map<std::string, MatrixH, std::less<>> named_vectors;

  /// Throws DataError when the record has no vector called `name`.
  const MatrixH& vectors(std::string_view name) const;
  bool has(std::string_view name) const { return named_vectors.find(name) != named_vectors.end(); }
};

/// Encodes FP32 named vectors as an FP16 record.
PageRecord make_record(std::string page_id, std::string dataset_id, const NamedVectors& vectors);

class Collection {
 public:
  Collection(std::string name, std::uint32_t dim) : name_(std::move(name)), dim_(dim) {}

  /// Appends a record. Throws DataError on duplicate id, width != d, missing
  /// `initial`, unknown names, a multi-row global vector, or non-finite FP16.
  void insert(PageRecord record);
  void insert(std::string page_id, std::string dataset_id, const NamedVectors& vectors) {
    insert(make_record(std::move(page_id), std::move(dataset_id), vectors));
  }

  /// Ends the build phase. Searches require a frozen collection.
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  const std::string& name() const { return name_; }
  std::uint32_t dim() const { return dim_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<PageRecord>& records() const { return records_; }
  const PageRecord& record(std::size_t i) const { return records_[i]; }

  /// Index of the record with `page_id`, or -1.
  std::ptrdiff_t find(std::string_view page_id) const;

  /// Resolves a dataset-local page id, accounting for union prefixing.
  std::ptrdiff_t resolve(std::string_view dataset_id, std::string_view page_id) const;

  /// True when every record carries the named vector.
  bool all_have(std::string_view vector_name) const;

  /// Total stored vectors under `vector_name`, summed over records.
  std::uint64_t vector_count(std::string_view vector_name) const;

 private:
  std::string name_;
  std::uint32_t dim_;
  bool frozen_ = false;
  std::vector<PageRecord> records_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

/// Concatenates collections. Page ids that occur in more than one input are
/// rewritten to `dataset_id/page_id` in every input. The result is frozen.
Collection merge(std::span<const Collection> collections, std::string name = "union");

inline constexpr std::uint32_t kIndexVersion = 1;

std::string encode_index(const Collection& col);
/// Decodes an index; the returned collection is frozen.
Collection decode_index(std::string_view bytes, std::string name = "index");

void save_index(const Collection& col, const std::filesystem::path& path);
Collection load_index(const std::filesystem::path& path);

}  // namespace lipool
