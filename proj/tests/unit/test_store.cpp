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

#include "lipool/store.hpp"
#include "oracles.hpp"

using namespace lipool;

namespace {

NamedVectors vectors(std::mt19937_64& rng, Eigen::Index d = 8) {
  return {{"initial", oracle::random_unit_rows(rng, 6, d)},
          {"mean_pooling", oracle::random_unit_rows(rng, 2, d)},
          {"global_pooling", oracle::random_unit_rows(rng, 1, d)}};
}

}  // namespace

TEST_CASE("insert validation") {
  std::mt19937_64 rng(41);
  Collection col("c", 8);
  col.insert("a", "ds", vectors(rng));
  CHECK_THROWS_AS(col.insert("a", "ds", vectors(rng)), DataError);
  CHECK_THROWS_AS(col.insert("b", "ds", vectors(rng, 4)), DataError);
  auto v = vectors(rng);
  v.erase("initial");
  CHECK_THROWS_AS(col.insert("c", "ds", v), DataError);
  v = vectors(rng);
  v["pooled"] = v["initial"];
  CHECK_THROWS_AS(col.insert("d", "ds", v), DataError);
  v = vectors(rng);
  v["global_pooling"] = oracle::random_unit_rows(rng, 2, 8);
  CHECK_THROWS_AS(col.insert("e", "ds", v), DataError);
  v = vectors(rng);
  v["initial"](0, 0) = 1e6f;  // overflows FP16
  CHECK_THROWS_AS(col.insert("f", "ds", v), DataError);
  CHECK(col.size() == 1);
  col.freeze();
  CHECK_THROWS_AS(col.insert("g", "ds", vectors(rng)), Error);
}

TEST_CASE("records store fp16 and count vectors") {
  std::mt19937_64 rng(42);
  Collection col("c", 8);
  const auto v = vectors(rng);
  col.insert("a", "ds", v);
  col.insert("b", "ds", vectors(rng));
  CHECK(col.record(0).vectors("initial") == to_half(v.at("initial")));
  CHECK(col.vector_count("initial") == 12);
  CHECK(col.vector_count("smoothed") == 0);
  CHECK(col.all_have("mean_pooling"));
  CHECK_FALSE(col.all_have("smoothed"));
  CHECK(col.find("b") == 1);
  CHECK(col.find("zz") == -1);
  CHECK_THROWS_AS(col.record(0).vectors("smoothed"), DataError);
}

TEST_CASE("merge prefixes colliding ids only") {
  std::mt19937_64 rng(43);
  std::vector<Collection> cols;
  cols.emplace_back("one", 8);
  cols.emplace_back("two", 8);
  cols[0].insert("shared", "one", vectors(rng));
  cols[0].insert("only1", "one", vectors(rng));
  cols[1].insert("shared", "two", vectors(rng));
  cols[1].insert("only2", "two", vectors(rng));
  const auto u = merge(cols);
  CHECK(u.frozen());
  CHECK(u.size() == 4);
  CHECK(u.find("one/shared") >= 0);
  CHECK(u.find("two/shared") >= 0);
  CHECK(u.find("only1") >= 0);
  CHECK(u.find("shared") == -1);
  CHECK(u.resolve("two", "shared") == u.find("two/shared"));
  CHECK(u.resolve("one", "only1") == u.find("only1"));
  CHECK(u.record(std::size_t(u.find("two/shared"))).vectors("initial") == cols[1].record(0).vectors("initial"));

  std::vector<Collection> bad;
  bad.emplace_back("x", 8);
  bad.emplace_back("y", 4);
  CHECK_THROWS_AS(merge(bad), DataError);
}

TEST_CASE("index files round trip byte for byte") {
  std::mt19937_64 rng(44);
  Collection col("c", 8);
  for (int i = 0; i < 5; ++i) col.insert("p" + std::to_string(i), "ds", vectors(rng));
  col.freeze();
  const std::string bytes = encode_index(col);
  const Collection back = decode_index(bytes, "c");
  CHECK(back.frozen());
  CHECK(back.size() == 5);
  CHECK(encode_index(back) == bytes);
  CHECK(back.record(3).vectors("mean_pooling") == col.record(3).vectors("mean_pooling"));

  oracle::TempDir dir("lix");
  save_index(col, dir / "idx.lix");
  CHECK(load_index(dir / "idx.lix").name() == "idx");

  CHECK_THROWS_AS(decode_index(bytes.substr(0, bytes.size() - 1)), FormatError);
  CHECK_THROWS_AS(decode_index("LIX9" + bytes.substr(4)), FormatError);
}
