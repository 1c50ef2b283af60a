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

#include "lipool/core.hpp"
#include "oracles.hpp"

using namespace lipool;

TEST_CASE("layout token counts") {
  CHECK(expected_token_count(FixedGrid{32, 32}) == 1024);
  CHECK(expected_token_count(TileGrid{4, 3, 64, true}) == 832);
  CHECK(expected_token_count(TileGrid{2, 2, 64, false}) == 256);
  CHECK(expected_token_count(MergedGrid{28, 26}) == 728);
}

TEST_CASE("layout validation reports mismatches") {
  CHECK_FALSE(validate_layout(FixedGrid{4, 4}, 16));
  CHECK(validate_layout(FixedGrid{4, 4}, 15));
  CHECK(validate_layout(TileGrid{1, 1, 64, true}, 64));
  CHECK(validate_layout(MergedGrid{0, 3}, 0));
}

TEST_CASE("layout family names round trip") {
  for (auto f : {LayoutFamily::fixed_grid, LayoutFamily::tile_grid, LayoutFamily::merged_grid})
    CHECK(parse_layout_family(to_string(f)) == f);
  CHECK_THROWS_AS(parse_layout_family("hexagonal"), InvalidArgument);
}

TEST_CASE("patch embedding set rejects bad input") {
  std::mt19937_64 rng(1);
  MatrixF ok = oracle::random_matrix(rng, 6, 4);
  CHECK_NOTHROW(PatchEmbeddingSet(ok, FixedGrid{2, 3}, "p"));
  CHECK_THROWS_AS(PatchEmbeddingSet(ok, FixedGrid{3, 3}, "p"), DataError);
  CHECK_THROWS_AS(PatchEmbeddingSet(MatrixF(0, 4), FixedGrid{0, 0}, "p"), DataError);
  MatrixF bad = ok;
  bad(1, 1) = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(PatchEmbeddingSet(bad, FixedGrid{2, 3}, "p"), DataError);
  bad(1, 1) = std::numeric_limits<float>::infinity();
  CHECK_THROWS_AS(PatchEmbeddingSet(bad, FixedGrid{2, 3}, "p"), DataError);
}

TEST_CASE("builtin profiles") {
  const auto colpali = profile_by_name("colpali");
  CHECK(colpali.dim == 128);
  CHECK(colpali.layout_family == LayoutFamily::fixed_grid);
  CHECK(colpali.prefix_nonvisual + colpali.suffix_nonvisual == 6);
  CHECK(profile_by_name("colsmol").layout_family == LayoutFamily::tile_grid);
  CHECK(profile_by_name("colqwen").max_pooled_rows == 32);
  CHECK_THROWS_AS(profile_by_name("clip"), InvalidArgument);
  CHECK(builtin_profile_names().size() == 3);
}

TEST_CASE("vector names") {
  CHECK(is_known_vector_name("initial"));
  CHECK(is_known_vector_name("global_pooling"));
  CHECK_FALSE(is_known_vector_name("pooled"));
}

TEST_CASE("fp16 conversion rounds to nearest even and widens exactly") {
  // 1 + 2^-11 is halfway between two halves; ties go to the even mantissa.
  CHECK(static_cast<float>(Half(1.0f + 0x1p-11f)) == 1.0f);
  CHECK(static_cast<float>(Half(1.0f + 3 * 0x1p-11f)) == 1.0f + 0x1p-9f);
  CHECK(half_bits(Half(1.0f)) == 0x3C00);
  CHECK(static_cast<float>(half_from_bits(0xC000)) == -2.0f);

  std::mt19937_64 rng(7);
  const MatrixH h = to_half(oracle::random_matrix(rng, 37, 13));
  MatrixF wide;
  widen(h, wide);
  REQUIRE(wide.rows() == 37);
  for (Eigen::Index i = 0; i < h.size(); ++i) CHECK(wide.data()[i] == static_cast<float>(h.data()[i]));
}

TEST_CASE("normalize_rows leaves zero rows alone") {
  MatrixF m(2, 3);
  m << 3, 4, 0, 0, 0, 0;
  normalize_rows(m);
  CHECK(m(0, 0) == Catch::Approx(0.6));
  CHECK(m(0, 1) == Catch::Approx(0.8));
  CHECK(m.row(1).isZero());
}
