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

// Seeded synthetic corpora with known relevance.
//
// Every page belongs to a topic (page i -> topic i mod n_topics). A page owns
// `keys_per_page` key vectors that lean toward its topic anchor, so pages of
// one topic are near-duplicates of each other. Keys fill a rectangular content
// region of the page grid (one key per column band); everything else is
// shared background. Each query is a noisy copy of one page's keys and that
// page is its single relevant judgment.
//
// Pages are generated independently from (seed, dataset, index), so any page
// can be produced on demand without materializing the corpus.

#include <cstdint>
#include <string>
#include <vector>

#include "lipool/eval.hpp"
#include "lipool/leb.hpp"

namespace lipool {

struct SyntheticSpec {
  std::size_t n_pages = 100;  // per dataset
  std::size_t n_datasets = 1;
  std::uint32_t dim = 128;
  GridLayout layout = FixedGrid{32, 32};
  bool vary_merged_grid = false;  // merged_grid: h_eff in [20,40], w_eff in [18,30] per page
  std::size_t n_topics = 10;
  double noise = 0.5;
  double topic_weight = 0.6;
  std::size_t keys_per_page = 4;
  std::size_t n_queries = 20;  // per dataset
  std::size_t query_tokens = 10;
  std::uint64_t seed = 42;
  bool normalize = true;

  // Raw-output wrapping, exercised by hygiene.
  std::uint32_t prefix_nonvisual = 0;
  std::uint32_t suffix_nonvisual = 0;
  std::uint32_t max_padding = 0;  // trailing zero rows, uniform in [0, max_padding]
  bool emit_mask = false;         // tile grids also get one separator per tile

  void validate() const;
};

class SyntheticCorpus {
 public:
  explicit SyntheticCorpus(SyntheticSpec spec);

  const SyntheticSpec& spec() const { return spec_; }

  std::string dataset_id(std::size_t dataset) const;
  std::string page_id(std::size_t index) const;

  /// Raw encoder-style output of one page.
  EmbeddingPage page(std::size_t dataset, std::size_t index) const;
  EmbeddingBundle bundle(std::size_t dataset) const;

  std::vector<QueryEmbedding> queries() const;
  /// Queries as LEB pages (FixedGrid{Q, 1}, dataset id carried along).
  EmbeddingBundle query_bundle() const;
  QrelSet qrels() const;

  /// Index of the page query `q` of `dataset` was drawn from.
  std::size_t query_target(std::size_t dataset, std::size_t q) const;

 private:
  MatrixF page_keys(std::size_t dataset, std::size_t index) const;
  std::string query_id(std::size_t dataset, std::size_t q) const;

  SyntheticSpec spec_;
  MatrixF topics_;      // n_topics x d
  MatrixF background_;  // 4 x d
  std::vector<std::vector<std::size_t>> targets_;  // per dataset, per query
};

}  // namespace lipool
