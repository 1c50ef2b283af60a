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

#include "lipool/store.hpp"

#include <unordered_set>

#include "lipool/binary_io.hpp"

namespace lipool {

const MatrixH& PageRecord::vectors(std::string_view name) const {
  auto it = named_vectors.find(name);
  if (it == named_vectors.end())
    throw DataError("page '" + page_id + "' has no named vector '" + std::string(name) + "'");
  return it->second;
}

PageRecord make_record(std::string page_id, std::string dataset_id, const NamedVectors& vectors) {
  PageRecord rec{std::move(page_id), std::move(dataset_id), {}};
  for (const auto& [name, m] : vectors) rec.named_vectors.emplace(name, to_half(m));
  return rec;
}

void Collection::insert(PageRecord record) {
  if (frozen_) throw InvalidArgument("collection '" + name_ + "' is frozen");
  const std::string where = "page '" + record.page_id + "': ";
  if (by_id_.count(record.page_id)) throw DataError(where + "duplicate page id in collection '" + name_ + "'");
  if (!record.has(vector_names::initial)) throw DataError(where + "record has no 'initial' vectors");
  for (const auto& [name, m] : record.named_vectors) {
    if (!is_known_vector_name(name)) throw DataError(where + "unknown named vector '" + name + "'");
    if (m.cols() != static_cast<Eigen::Index>(dim_))
      throw DataError(where + "'" + name + "' has width " + std::to_string(m.cols()) + ", collection d=" +
                      std::to_string(dim_));
    if (m.rows() < 1) throw DataError(where + "'" + name + "' is empty");
    if (!all_finite(m)) throw DataError(where + "'" + name + "' is not finite in FP16");
  }
  const auto initial_count = record.vectors(vector_names::initial).rows();
  if (record.has(vector_names::global_pooling) && record.vectors(vector_names::global_pooling).rows() != 1)
    throw DataError(where + "'global_pooling' must hold exactly one vector");
  if (record.has(vector_names::mean_pooling) && record.vectors(vector_names::mean_pooling).rows() > initial_count)
    throw DataError(where + "'mean_pooling' has more vectors than 'initial'");

  by_id_.emplace(record.page_id, records_.size());
  records_.push_back(std::move(record));
}

std::ptrdiff_t Collection::find(std::string_view page_id) const {
  auto it = by_id_.find(std::string(page_id));
  return it == by_id_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::ptrdiff_t Collection::resolve(std::string_view dataset_id, std::string_view page_id) const {
  if (!dataset_id.empty()) {
    const auto prefixed = find(std::string(dataset_id) + "/" + std::string(page_id));
    if (prefixed >= 0) return prefixed;
  }
  return find(page_id);
}

bool Collection::all_have(std::string_view vector_name) const {
  for (const auto& r : records_)
    if (!r.has(vector_name)) return false;
  return true;
}

std::uint64_t Collection::vector_count(std::string_view vector_name) const {
  std::uint64_t total = 0;
  for (const auto& r : records_)
    if (r.has(vector_name)) total += static_cast<std::uint64_t>(r.vectors(vector_name).rows());
  return total;
}

Collection merge(std::span<const Collection> collections, std::string name) {
  if (collections.empty()) throw InvalidArgument("merge needs at least one collection");
  const auto dim = collections.front().dim();
  std::unordered_map<std::string, std::size_t> owners;
  std::unordered_set<std::string> colliding;
  for (std::size_t c = 0; c < collections.size(); ++c) {
    if (collections[c].dim() != dim)
      throw DataError("merge: collection '" + collections[c].name() + "' has d=" +
                      std::to_string(collections[c].dim()) + ", expected " + std::to_string(dim));
    for (const auto& r : collections[c].records()) {
      auto [it, inserted] = owners.emplace(r.page_id, c);
      if (!inserted && it->second != c) colliding.insert(r.page_id);
    }
  }

  Collection out(std::move(name), dim);
  for (const auto& col : collections) {
    for (const auto& r : col.records()) {
      PageRecord copy = r;
      if (colliding.count(r.page_id)) {
        const std::string& prefix = r.dataset_id.empty() ? col.name() : r.dataset_id;
        copy.page_id = prefix + "/" + r.page_id;
      }
      out.insert(std::move(copy));
    }
  }
  out.freeze();
  return out;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {
constexpr std::string_view kIndexMagic = "LIX1";
}

std::string encode_index(const Collection& col) {
  io::ByteWriter w;
  w.bytes(kIndexMagic);
  w.u32(kIndexVersion);
  w.u32(col.dim());
  w.u64(col.size());
  for (const auto& r : col.records()) {
    w.u32(static_cast<std::uint32_t>(r.page_id.size()));
    w.bytes(r.page_id);
    w.u32(static_cast<std::uint32_t>(r.dataset_id.size()));
    w.bytes(r.dataset_id);
    w.u8(static_cast<std::uint8_t>(r.named_vectors.size()));
    for (const auto& [name, m] : r.named_vectors) {
      w.u8(static_cast<std::uint8_t>(name.size()));
      w.bytes(name);
      w.u32(static_cast<std::uint32_t>(m.rows()));
      const Half* data = m.data();
      for (Eigen::Index i = 0; i < m.size(); ++i) w.u16(half_bits(data[i]));
    }
  }
  return w.release();
}

Collection decode_index(std::string_view bytes, std::string name) {
  io::ByteReader r(bytes);
  if (r.remaining() < kIndexMagic.size() || r.bytes(kIndexMagic.size()) != kIndexMagic)
    throw FormatError("bad magic", 0);
  const auto version_at = r.offset();
  const auto version = r.u32();
  if (version != kIndexVersion) {
    throw FormatError("unsupported index version " + std::to_string(version) + " (reader supports " +
                          std::to_string(kIndexVersion) + ")",
                      version_at);
  }
  const auto dim_at = r.offset();
  const auto dim = r.u32();
  if (dim == 0) throw FormatError("index d must be >= 1", dim_at);
  const auto page_count = r.u64();

  Collection col(std::move(name), dim);
  for (std::uint64_t p = 0; p < page_count; ++p) {
    const auto record_at = r.offset();
    PageRecord rec;
    rec.page_id = std::string(r.bytes(r.u32()));
    rec.dataset_id = std::string(r.bytes(r.u32()));
    const auto nv = r.u8();
    for (std::uint8_t v = 0; v < nv; ++v) {
      std::string vname(r.bytes(r.u8()));
      const auto count = r.u32();
      const std::uint64_t values = std::uint64_t{count} * dim;
      if (values > r.remaining() / 2) throw FormatError("truncated payload in '" + vname + "'", r.offset());
      MatrixH m(count, dim);
      Half* data = m.data();
      for (std::uint64_t i = 0; i < values; ++i) data[i] = half_from_bits(r.u16());
      rec.named_vectors.emplace(std::move(vname), std::move(m));
    }
    try {
      col.insert(std::move(rec));
    } catch (const DataError& e) {
      throw FormatError(std::string("invalid record: ") + e.what(), record_at);
    }
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after last page", r.offset());
  col.freeze();
  return col;
}

void save_index(const Collection& col, const std::filesystem::path& path) {
  io::write_file(path, encode_index(col));
}

Collection load_index(const std::filesystem::path& path) {
  return decode_index(io::read_file(path), path.stem().string());
}

}  // namespace lipool
