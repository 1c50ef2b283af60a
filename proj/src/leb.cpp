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

#include "lipool/leb.hpp"

#include <fstream>
#include <iterator>

#include "lipool/binary_io.hpp"

namespace lipool {

namespace io {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "' for reading");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

}  // namespace io

namespace {

constexpr std::string_view kMagic = "LEB1";

void write_layout(io::ByteWriter& w, const GridLayout& layout) {
  w.u8(static_cast<std::uint8_t>(layout.index()));
  if (const auto* g = std::get_if<FixedGrid>(&layout)) {
    w.u32(g->height);
    w.u32(g->width);
  } else if (const auto* t = std::get_if<TileGrid>(&layout)) {
    w.u32(t->n_rows);
    w.u32(t->n_cols);
    w.u32(t->patches_per_tile);
    w.u32(t->has_global_tile ? 1 : 0);
  } else {
    const auto& m = std::get<MergedGrid>(layout);
    w.u32(m.h_eff);
    w.u32(m.w_eff);
  }
}

GridLayout read_layout(io::ByteReader& r) {
  const auto tag_at = r.offset();
  switch (r.u8()) {
    case 0: {
      FixedGrid g;
      g.height = r.u32();
      g.width = r.u32();
      return g;
    }
    case 1: {
      TileGrid t;
      t.n_rows = r.u32();
      t.n_cols = r.u32();
      t.patches_per_tile = r.u32();
      const auto flag_at = r.offset();
      const auto flag = r.u32();
      if (flag > 1) throw FormatError("bad has_global flag", flag_at);
      t.has_global_tile = flag == 1;
      return t;
    }
    case 2: {
      MergedGrid m;
      m.h_eff = r.u32();
      m.w_eff = r.u32();
      return m;
    }
    default:
      throw FormatError("bad layout tag", tag_at);
  }
}

std::string read_string(io::ByteReader& r) {
  const auto len = r.u32();
  return std::string(r.bytes(len));
}

}  // namespace

std::string encode_embedding_bundle(const EmbeddingBundle& bundle) {
  io::ByteWriter w;
  w.bytes(kMagic);
  w.u32(kLebVersion);
  w.u32(bundle.dim);
  w.u64(bundle.pages.size());
  for (const auto& page : bundle.pages) {
    const auto& raw = page.raw;
    if (raw.vectors.cols() != static_cast<Eigen::Index>(bundle.dim)) {
      throw DataError("page '" + page.page_id + "': dim mismatch, bundle d=" + std::to_string(bundle.dim) +
                      ", page d=" + std::to_string(raw.vectors.cols()));
    }
    if (raw.visual_mask && raw.visual_mask->size() != static_cast<std::size_t>(raw.vectors.rows())) {
      throw DataError("page '" + page.page_id + "': visual mask length differs from token count");
    }
    w.u32(static_cast<std::uint32_t>(page.page_id.size()));
    w.bytes(page.page_id);
    w.u32(static_cast<std::uint32_t>(page.dataset_id.size()));
    w.bytes(page.dataset_id);
    write_layout(w, raw.layout);
    w.u32(static_cast<std::uint32_t>(raw.vectors.rows()));
    w.u8(raw.visual_mask ? 1 : 0);
    if (raw.visual_mask) {
      for (bool v : *raw.visual_mask) w.u8(v ? 1 : 0);
    }
    w.u8(static_cast<std::uint8_t>(page.dtype));
    const float* data = raw.vectors.data();
    const auto n = raw.vectors.size();
    if (page.dtype == StorageType::f32) {
      for (Eigen::Index i = 0; i < n; ++i) w.f32(data[i]);
    } else {
      for (Eigen::Index i = 0; i < n; ++i) w.u16(half_bits(Half(data[i])));
    }
  }
  return w.release();
}

EmbeddingBundle decode_embedding_bundle(std::string_view bytes) {
  io::ByteReader r(bytes);
  if (r.remaining() < kMagic.size() || r.bytes(kMagic.size()) != kMagic) throw FormatError("bad magic", 0);
  const auto version_at = r.offset();
  const auto version = r.u32();
  if (version != kLebVersion) {
    throw FormatError("unsupported LEB version " + std::to_string(version) + " (reader supports " +
                          std::to_string(kLebVersion) + ")",
                      version_at);
  }
  EmbeddingBundle bundle;
  const auto dim_at = r.offset();
  bundle.dim = r.u32();
  if (bundle.dim == 0) throw FormatError("dim mismatch: d must be >= 1", dim_at);
  const auto page_count = r.u64();

  for (std::uint64_t p = 0; p < page_count; ++p) {
    EmbeddingPage page;
    page.page_id = read_string(r);
    page.dataset_id = read_string(r);
    page.raw.layout = read_layout(r);
    const auto total = r.u32();
    const auto mask_at = r.offset();
    const auto mask_present = r.u8();
    if (mask_present > 1) throw FormatError("bad mask_present flag", mask_at);
    if (mask_present == 1) {
      const auto mask_bytes = r.bytes(total);
      std::vector<bool> mask(total);
      for (std::uint32_t i = 0; i < total; ++i) {
        const auto b = static_cast<unsigned char>(mask_bytes[i]);
        if (b > 1) throw FormatError("bad visual mask byte", r.offset() - total + i);
        mask[i] = b == 1;
      }
      page.raw.visual_mask = std::move(mask);
    }
    const auto dtype_at = r.offset();
    const auto dtype = r.u8();
    if (dtype > 1) throw FormatError("bad dtype", dtype_at);
    page.dtype = static_cast<StorageType>(dtype);

    const std::uint64_t count = std::uint64_t{total} * bundle.dim;
    const std::uint64_t width = page.dtype == StorageType::f32 ? 4 : 2;
    if (count > r.remaining() / width) {
      throw FormatError("truncated payload: page '" + page.page_id + "' needs " + std::to_string(count * width) +
                            " value bytes",
                        r.offset());
    }
    page.raw.vectors.resize(total, bundle.dim);
    float* out = page.raw.vectors.data();
    if (page.dtype == StorageType::f32) {
      for (std::uint64_t i = 0; i < count; ++i) out[i] = r.f32();
    } else {
      for (std::uint64_t i = 0; i < count; ++i) out[i] = static_cast<float>(half_from_bits(r.u16()));
    }
    bundle.pages.push_back(std::move(page));
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after last page", r.offset());
  return bundle;
}

EmbeddingBundle read_embedding_file(const std::filesystem::path& path) {
  return decode_embedding_bundle(io::read_file(path));
}

void write_embedding_file(const std::filesystem::path& path, const EmbeddingBundle& bundle) {
  io::write_file(path, encode_embedding_bundle(bundle));
}

}  // namespace lipool
