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

// Exact late-interaction (MaxSim) scoring.
//
//   score(q, doc) = sum over query tokens of max over doc vectors <token, vec>
//
// FP16 documents are widened to FP32 before the product. Scores depend only
// on the (query, doc) pair, never on batch composition or thread count.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lipool/core.hpp"

namespace lipool {

struct QueryEmbedding {
  std::string query_id;
  std::string dataset_id;
  MatrixF tokens;  // Q x d, used as shipped (no normalization)

  Eigen::Index size() const { return tokens.rows(); }
  /// Throws DataError when Q < 1 or entries are not finite.
  void validate() const;
};

/// Reusable buffers for scoring many documents against one query.
struct MaxSimScratch {
  MatrixF doc;
  MatrixF sims;
};

namespace detail {
template <class Doc>
void check_dims(const MatrixF& query, const Eigen::MatrixBase<Doc>& doc) {
  if (query.cols() != doc.cols())
    throw InvalidArgument("maxsim: query d=" + std::to_string(query.cols()) + " but doc d=" +
                          std::to_string(doc.cols()));
  if (doc.rows() < 1) throw InvalidArgument("maxsim: document has no vectors");
  if (query.rows() < 1) throw InvalidArgument("maxsim: query has no tokens");
}

// Sum of per-query-token maxima over a (doc x query) similarity matrix,
// accumulated in query-token order.
inline float sum_of_column_max(const MatrixF& sims) {
  float total = 0.0f;
  for (Eigen::Index q = 0; q < sims.cols(); ++q) total += sims.col(q).maxCoeff();
  return total;
}
}  // namespace detail

template <class Doc>
float maxsim(const MatrixF& query, const Eigen::MatrixBase<Doc>& doc, MaxSimScratch& scratch) {
  detail::check_dims(query, doc);
  if constexpr (std::is_same_v<typename Doc::Scalar, float>) {
    scratch.sims.noalias() = doc.derived() * query.transpose();
  } else if constexpr (std::is_same_v<Doc, MatrixH>) {
    widen(doc.derived(), scratch.doc);
    scratch.sims.noalias() = scratch.doc * query.transpose();
  } else {
    scratch.doc = doc.template cast<float>();
    scratch.sims.noalias() = scratch.doc * query.transpose();
  }
  return detail::sum_of_column_max(scratch.sims);
}

template <class Doc>
float maxsim(const MatrixF& query, const Eigen::MatrixBase<Doc>& doc) {
  MaxSimScratch scratch;
  return maxsim(query, doc, scratch);
}

template <class Doc>
float maxsim(const QueryEmbedding& query, const Eigen::MatrixBase<Doc>& doc) {
  return maxsim(query.tokens, doc);
}

/// Scores every document; results are in input order. `threads` = 0 uses all
/// hardware threads.
std::vector<float> maxsim_batch(const QueryEmbedding& query, std::span<const MatrixH> docs, int threads = 1);
std::vector<float> maxsim_batch(const QueryEmbedding& query, std::span<const MatrixF> docs, int threads = 1);

/// Multiply-adds for an exhaustive scan: Q * D * N * d. Throws
/// std::overflow_error instead of wrapping.
std::uint64_t count_multiply_adds(std::uint64_t q, std::uint64_t d_vectors, std::uint64_t n_pages,
                                  std::uint64_t dim);

}  // namespace lipool
