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

// LEB ("late-interaction embedding bundle"): raw per-page encoder output with
// optional visual masks and layout metadata.
//
//   header   magic "LEB1" | version u32 (=1) | d u32 | page_count u64
//   per page id_len u32 | id | dataset_len u32 | dataset
//            layout_tag u8 (0 fixed, 1 tile, 2 merged) | layout u32s
//            T_total u32 | mask_present u8 | [T_total mask bytes]
//            dtype u8 (0 f32, 1 f16) | T_total*d values
//
// All integers and floats are little-endian.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lipool/core.hpp"

namespace lipool {

enum class StorageType : std::uint8_t { f32 = 0, f16 = 1 };

struct EmbeddingPage {
  std::string page_id;
  std::string dataset_id;
  RawModelOutput raw;
  StorageType dtype = StorageType::f32;
};

struct EmbeddingBundle {
  std::uint32_t dim = 0;
  std::vector<EmbeddingPage> pages;
};

inline constexpr std::uint32_t kLebVersion = 1;

std::string encode_embedding_bundle(const EmbeddingBundle& bundle);
EmbeddingBundle decode_embedding_bundle(std::string_view bytes);

EmbeddingBundle read_embedding_file(const std::filesystem::path& path);
void write_embedding_file(const std::filesystem::path& path, const EmbeddingBundle& bundle);

}  // namespace lipool
