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

#include "lipool/scoring.hpp"
#include "oracles.hpp"

using namespace lipool;

TEST_CASE("maxsim matches brute force") {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 100; ++i) {
    const long q = std::uniform_int_distribution<long>(1, 20)(rng);
    const long n = std::uniform_int_distribution<long>(1, 300)(rng);
    const MatrixF query = oracle::random_unit_rows(rng, q, 64);
    const MatrixF doc = oracle::random_unit_rows(rng, n, 64);
    const double want = oracle::maxsim(oracle::to_rows(query), oracle::to_rows(doc));
    CHECK(std::abs(maxsim(query, doc) - want) <= 1e-6 * std::abs(want));
    const MatrixH half = to_half(doc);
    const double want_half = oracle::maxsim(oracle::to_rows(query), oracle::to_rows(half));
    CHECK(std::abs(maxsim(query, half) - want_half) <= 1e-6 * std::abs(want_half));
  }
}

TEST_CASE("maxsim hand example") {
  MatrixF q(2, 2), d(3, 2);
  q << 1, 0, 0, 1;
  d << 0.5, 0.1, 0.2, 0.9, -1, -1;
  CHECK(maxsim(q, d) == Catch::Approx(0.5 + 0.9));
}

TEST_CASE("batch scores do not depend on thread count") {
  std::mt19937_64 rng(52);
  QueryEmbedding q{"q", "", oracle::random_unit_rows(rng, 10, 32)};
  std::vector<MatrixH> docs;
  for (int i = 0; i < 57; ++i) docs.push_back(to_half(oracle::random_unit_rows(rng, 40, 32)));
  const auto one = maxsim_batch(q, docs, 1);
  CHECK(maxsim_batch(q, docs, 4) == one);
  CHECK(maxsim_batch(q, docs, 0) == one);
  for (std::size_t i = 0; i < docs.size(); ++i) CHECK(one[i] == maxsim(q.tokens, docs[i]));
}

TEST_CASE("dimension and query validation") {
  CHECK_THROWS_AS(maxsim(MatrixF::Ones(2, 4), MatrixF::Ones(3, 5)), InvalidArgument);
  QueryEmbedding empty{"q", "", MatrixF(0, 4)};
  CHECK_THROWS_AS(empty.validate(), DataError);
  QueryEmbedding nan{"q", "", MatrixF::Constant(1, 4, std::numeric_limits<float>::quiet_NaN())};
  CHECK_THROWS_AS(nan.validate(), DataError);
}

TEST_CASE("multiply-add counts") {
  CHECK(count_multiply_adds(10, 1024, 10000, 128) == 13'107'200'000ULL);
  CHECK(count_multiply_adds(10, 32, 10000, 128) == 409'600'000ULL);
  CHECK_THROWS_AS(count_multiply_adds(1ULL << 32, 1ULL << 32, 2, 1), std::overflow_error);
}
