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

#include <catch_amalgamated.hpp>

#include <random>

#include "lipool/binary_io.hpp"
#include "lipool/leb.hpp"
#include "oracles.hpp"

using namespace lipool;

namespace {

EmbeddingBundle sample_bundle() {
  std::mt19937_64 rng(3);
  EmbeddingBundle b;
  b.dim = 8;
  EmbeddingPage fixed{"p0", "ds", {oracle::random_matrix(rng, 7, 8), std::nullopt, FixedGrid{2, 3}}, StorageType::f32};
  std::vector<bool> mask(10, true);
  mask[0] = mask[9] = false;
  EmbeddingPage tiles{"p1", "ds", {oracle::random_matrix(rng, 10, 8), mask, TileGrid{2, 2, 2, false}}, StorageType::f32};
  EmbeddingPage merged{"p2", "", {oracle::random_matrix(rng, 6, 8), std::nullopt, MergedGrid{2, 3}}, StorageType::f16};
  b.pages = {fixed, tiles, merged};
  return b;
}

}  // namespace

TEST_CASE("leb round trip preserves everything") {
  const auto bundle = sample_bundle();
  const auto decoded = decode_embedding_bundle(encode_embedding_bundle(bundle));
  REQUIRE(decoded.dim == 8);
  REQUIRE(decoded.pages.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& a = bundle.pages[i];
    const auto& b = decoded.pages[i];
    CHECK(a.page_id == b.page_id);
    CHECK(a.dataset_id == b.dataset_id);
    CHECK(a.dtype == b.dtype);
    CHECK(a.raw.layout == b.raw.layout);
    CHECK(a.raw.visual_mask == b.raw.visual_mask);
    if (a.dtype == StorageType::f32) {
      CHECK(a.raw.vectors == b.raw.vectors);
    } else {
      CHECK(to_float(to_half(a.raw.vectors)) == b.raw.vectors);
    }
  }
}

TEST_CASE("leb header layout is little endian") {
  EmbeddingBundle b;
  b.dim = 2;
  b.pages.push_back({"x", "", {MatrixF::Ones(1, 2), std::nullopt, FixedGrid{1, 1}}, StorageType::f32});
  const std::string bytes = encode_embedding_bundle(b);
  CHECK(bytes.substr(0, 4) == "LEB1");
  CHECK(bytes[4] == 1);
  CHECK(bytes[8] == 2);
  CHECK(bytes[12] == 1);
  // header 20 + id 4+1 + dataset 4 + tag 1 + grid 8 + T 4 + mask flag 1 + dtype 1 + 2 floats
  CHECK(bytes.size() == 20 + 5 + 4 + 1 + 8 + 4 + 1 + 1 + 8);
}

TEST_CASE("leb decode failures carry byte offsets") {
  const std::string good = encode_embedding_bundle(sample_bundle());

  auto fails_with = [](std::string bytes, const std::string& needle) {
    try {
      decode_embedding_bundle(bytes);
    } catch (const FormatError& e) {
      INFO(e.what());
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
      CHECK(std::string(e.what()).find("at byte") != std::string::npos);
      return;
    }
    FAIL("expected FormatError containing '" << needle << "'");
  };

  std::string bad = good;
  bad[0] = 'X';
  fails_with(bad, "magic");
  bad = good;
  bad[4] = 9;
  fails_with(bad, "version");
  fails_with(good.substr(0, good.size() - 3), "truncated");
  fails_with(good + "zz", "trailing");
  bad = good;
  bad[8] = bad[9] = bad[10] = bad[11] = 0;
  fails_with(bad, "d");
}

TEST_CASE("leb encode rejects inconsistent pages") {
  auto b = sample_bundle();
  b.pages[0].raw.vectors = MatrixF::Zero(7, 5);
  CHECK_THROWS_AS(encode_embedding_bundle(b), DataError);
  b = sample_bundle();
  b.pages[1].raw.visual_mask->pop_back();
  CHECK_THROWS_AS(encode_embedding_bundle(b), DataError);
}

TEST_CASE("leb files round trip through disk") {
  oracle::TempDir dir("leb");
  write_embedding_file(dir / "a.leb", sample_bundle());
  CHECK(read_embedding_file(dir / "a.leb").pages.size() == 3);
  CHECK_THROWS_AS(read_embedding_file(dir / "missing.leb"), Error);
}
