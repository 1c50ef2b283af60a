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

#include "lipool/scoring.hpp"

#include <stdexcept>

#include "lipool/parallel.hpp"

namespace lipool {

void QueryEmbedding::validate() const {
  if (tokens.rows() < 1) throw DataError("query '" + query_id + "' has no tokens");
  if (!tokens.allFinite()) throw DataError("query '" + query_id + "' has non-finite tokens");
}

namespace {
template <class M>
std::vector<float> batch_impl(const QueryEmbedding& query, std::span<const M> docs, int threads) {
  std::vector<float> scores(docs.size());
  parallel_for(docs.size(), threads, [&](std::size_t begin, std::size_t end) {
    MaxSimScratch scratch;
    for (std::size_t i = begin; i < end; ++i) scores[i] = maxsim(query.tokens, docs[i], scratch);
  });
  return scores;
}
}  // namespace

std::vector<float> maxsim_batch(const QueryEmbedding& query, std::span<const MatrixH> docs, int threads) {
  return batch_impl(query, docs, threads);
}

std::vector<float> maxsim_batch(const QueryEmbedding& query, std::span<const MatrixF> docs, int threads) {
  return batch_impl(query, docs, threads);
}

std::uint64_t count_multiply_adds(std::uint64_t q, std::uint64_t d_vectors, std::uint64_t n_pages,
                                  std::uint64_t dim) {
  if (q == 0 || d_vectors == 0 || n_pages == 0 || dim == 0)
    throw InvalidArgument("count_multiply_adds: all factors must be >= 1");
  std::uint64_t total = q;
  for (std::uint64_t f : {d_vectors, n_pages, dim}) {
    if (__builtin_mul_overflow(total, f, &total))
      throw std::overflow_error("count_multiply_adds: product exceeds 64 bits");
  }
  return total;
}

}  // namespace lipool
