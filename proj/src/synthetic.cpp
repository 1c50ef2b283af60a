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

#include "lipool/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

namespace lipool {

namespace {

// splitmix64 finalizer; derives independent stream seeds from a few integers.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  return mix(mix(mix(seed ^ mix(a)) ^ b) ^ mix(c + 0x51ED27ull));
}

enum Stream : std::uint64_t { kTopics = 1, kKeys = 2, kTokens = 3, kQueries = 4, kTargets = 5, kBackground = 6 };

MatrixF gaussian_rows(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<float> normal(0.0f, 1.0f);
  MatrixF m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

MatrixF unit_rows(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  MatrixF m = gaussian_rows(rng, rows, cols);
  normalize_rows(m);
  return m;
}

// Fractional canvas position (y, x) in [0,1)^2 of every visual token.
std::vector<std::pair<double, double>> token_positions(const GridLayout& layout) {
  std::vector<std::pair<double, double>> pos;
  if (const auto* g = std::get_if<FixedGrid>(&layout)) {
    for (std::uint32_t y = 0; y < g->height; ++y)
      for (std::uint32_t x = 0; x < g->width; ++x) pos.emplace_back((y + 0.5) / g->height, (x + 0.5) / g->width);
  } else if (const auto* m = std::get_if<MergedGrid>(&layout)) {
    for (std::uint32_t y = 0; y < m->h_eff; ++y)
      for (std::uint32_t x = 0; x < m->w_eff; ++x) pos.emplace_back((y + 0.5) / m->h_eff, (x + 0.5) / m->w_eff);
  } else {
    const auto& t = std::get<TileGrid>(layout);
    auto side = static_cast<std::uint32_t>(std::lround(std::sqrt(double(t.patches_per_tile))));
    std::uint32_t side_y = side, side_x = side;
    if (side * side != t.patches_per_tile) side_y = 1, side_x = t.patches_per_tile;
    for (std::uint32_t tr = 0; tr < t.n_rows; ++tr)
      for (std::uint32_t tc = 0; tc < t.n_cols; ++tc)
        for (std::uint32_t p = 0; p < t.patches_per_tile; ++p)
          pos.emplace_back((tr * side_y + p / side_x + 0.5) / (t.n_rows * side_y),
                           (tc * side_x + p % side_x + 0.5) / (t.n_cols * side_x));
    if (t.has_global_tile)
      for (std::uint32_t p = 0; p < t.patches_per_tile; ++p)
        pos.emplace_back((p / side_x + 0.5) / side_y, (p % side_x + 0.5) / side_x);
  }
  return pos;
}

// Lattice size (rows, cols) behind token_positions.
std::pair<double, double> canvas_size(const GridLayout& layout) {
  if (const auto* g = std::get_if<FixedGrid>(&layout)) return {g->height, g->width};
  if (const auto* m = std::get_if<MergedGrid>(&layout)) return {m->h_eff, m->w_eff};
  const auto& t = std::get<TileGrid>(layout);
  auto side = static_cast<std::uint32_t>(std::lround(std::sqrt(double(t.patches_per_tile))));
  if (side * side != t.patches_per_tile) return {t.n_rows, double(t.n_cols) * t.patches_per_tile};
  return {double(t.n_rows) * side, double(t.n_cols) * side};
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n_pages < 1 || n_datasets < 1) throw InvalidArgument("synthetic corpus needs >= 1 page and dataset");
  if (dim < 1) throw InvalidArgument("synthetic dim must be >= 1");
  if (n_topics < 1) throw InvalidArgument("synthetic corpus needs >= 1 topic");
  if (keys_per_page < 1) throw InvalidArgument("keys_per_page must be >= 1");
  if (query_tokens < 1) throw InvalidArgument("query_tokens must be >= 1");
  if (!(noise >= 0.0)) throw InvalidArgument("noise must be >= 0");
  if (!(topic_weight >= 0.0 && topic_weight <= 1.0)) throw InvalidArgument("topic_weight must be in [0, 1]");
  if (expected_token_count(layout) < 1) throw InvalidArgument("synthetic layout must describe >= 1 token");
}

SyntheticCorpus::SyntheticCorpus(SyntheticSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  std::mt19937_64 topic_rng(derive(spec_.seed, kTopics));
  topics_ = unit_rows(topic_rng, static_cast<Eigen::Index>(spec_.n_topics), spec_.dim);
  std::mt19937_64 bg_rng(derive(spec_.seed, kBackground));
  background_ = unit_rows(bg_rng, 4, spec_.dim);

  targets_.resize(spec_.n_datasets);
  for (std::size_t ds = 0; ds < spec_.n_datasets; ++ds) {
    std::vector<std::size_t> order(spec_.n_pages);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(derive(spec_.seed, kTargets, ds));
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t q = 0; q < spec_.n_queries; ++q) targets_[ds].push_back(order[q % order.size()]);
  }
}

std::string SyntheticCorpus::dataset_id(std::size_t dataset) const { return "synth" + std::to_string(dataset); }

std::string SyntheticCorpus::page_id(std::size_t index) const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "page-%05zu", index);
  return buf;
}

std::string SyntheticCorpus::query_id(std::size_t dataset, std::size_t q) const {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s-q%04zu", dataset_id(dataset).c_str(), q);
  return buf;
}

std::size_t SyntheticCorpus::query_target(std::size_t dataset, std::size_t q) const { return targets_.at(dataset).at(q); }

MatrixF SyntheticCorpus::page_keys(std::size_t dataset, std::size_t index) const {
  std::mt19937_64 rng(derive(spec_.seed, kKeys, dataset, index));
  const auto topic = static_cast<Eigen::Index>(index % spec_.n_topics);
  MatrixF keys = unit_rows(rng, static_cast<Eigen::Index>(spec_.keys_per_page), spec_.dim);
  const float tw = static_cast<float>(spec_.topic_weight);
  const float own = std::sqrt(1.0f - tw * tw);
  for (Eigen::Index k = 0; k < keys.rows(); ++k) keys.row(k) = tw * topics_.row(topic) + own * keys.row(k);
  normalize_rows(keys);
  return keys;
}

EmbeddingPage SyntheticCorpus::page(std::size_t dataset, std::size_t index) const {
  std::mt19937_64 rng(derive(spec_.seed, kTokens, dataset, index));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<float> normal(0.0f, 1.0f);

  GridLayout layout = spec_.layout;
  if (spec_.vary_merged_grid && std::holds_alternative<MergedGrid>(layout)) {
    layout = MergedGrid{static_cast<std::uint32_t>(20 + rng() % 21), static_cast<std::uint32_t>(18 + rng() % 13)};
  }

  // Content rectangle in fractional canvas coordinates. On small canvases
  // it is widened so it always covers one lattice row and one column per key.
  const auto [canvas_h, canvas_w] = canvas_size(layout);
  const double band_h = std::max(0.25 + 0.25 * unit(rng), std::min(1.0, 1.0 / canvas_h));
  const double y0 = unit(rng) * (1.0 - band_h);
  const double band_w =
      std::max(0.4 + 0.6 * unit(rng), std::min(1.0, static_cast<double>(spec_.keys_per_page) / canvas_w));
  const double x0 = unit(rng) * (1.0 - band_w);

  const MatrixF keys = page_keys(dataset, index);
  const auto positions = token_positions(layout);
  const auto visual = static_cast<Eigen::Index>(positions.size());
  const auto d = static_cast<Eigen::Index>(spec_.dim);
  const float noise_scale = static_cast<float>(spec_.noise / std::sqrt(double(spec_.dim)));

  MatrixF tokens(visual, d);
  for (Eigen::Index i = 0; i < visual; ++i) {
    const auto [fy, fx] = positions[static_cast<std::size_t>(i)];
    const bool content = fy >= y0 && fy < y0 + band_h && fx >= x0 && fx < x0 + band_w;
    if (content) {
      auto k = static_cast<Eigen::Index>((fx - x0) / band_w * static_cast<double>(spec_.keys_per_page));
      tokens.row(i) = keys.row(std::min<Eigen::Index>(k, keys.rows() - 1));
    } else {
      tokens.row(i) = background_.row(static_cast<Eigen::Index>(i % 4));
    }
    for (Eigen::Index c = 0; c < d; ++c) tokens(i, c) += noise_scale * normal(rng);
  }
  if (spec_.normalize) normalize_rows(tokens);

  // Wrap with non-visual tokens: prefix | [separator per tile] visual | suffix | padding.
  const bool separators = spec_.emit_mask && std::holds_alternative<TileGrid>(layout);
  const Eigen::Index per_tile = separators ? std::get<TileGrid>(layout).patches_per_tile : 0;
  const Eigen::Index n_sep = separators ? visual / per_tile : 0;
  const Eigen::Index padding = spec_.max_padding ? static_cast<Eigen::Index>(rng() % (spec_.max_padding + 1)) : 0;
  const Eigen::Index total = spec_.prefix_nonvisual + n_sep + visual + spec_.suffix_nonvisual + padding;

  MatrixF raw = MatrixF::Zero(total, d);
  std::vector<bool> mask(static_cast<std::size_t>(total), false);
  Eigen::Index row = 0;
  auto special = [&]() {
    raw.row(row) = gaussian_rows(rng, 1, d).row(0).normalized();
    ++row;
  };
  for (std::uint32_t i = 0; i < spec_.prefix_nonvisual; ++i) special();
  for (Eigen::Index i = 0; i < visual; ++i) {
    if (separators && i % per_tile == 0) special();
    raw.row(row) = tokens.row(i);
    mask[static_cast<std::size_t>(row)] = true;
    ++row;
  }
  for (std::uint32_t i = 0; i < spec_.suffix_nonvisual; ++i) special();

  EmbeddingPage page;
  page.page_id = page_id(index);
  page.dataset_id = dataset_id(dataset);
  page.raw.vectors = std::move(raw);
  page.raw.layout = layout;
  if (spec_.emit_mask) page.raw.visual_mask = std::move(mask);
  return page;
}

EmbeddingBundle SyntheticCorpus::bundle(std::size_t dataset) const {
  EmbeddingBundle b;
  b.dim = spec_.dim;
  for (std::size_t i = 0; i < spec_.n_pages; ++i) b.pages.push_back(page(dataset, i));
  return b;
}

std::vector<QueryEmbedding> SyntheticCorpus::queries() const {
  std::vector<QueryEmbedding> out;
  const float noise_scale = static_cast<float>(spec_.noise / std::sqrt(double(spec_.dim)));
  for (std::size_t ds = 0; ds < spec_.n_datasets; ++ds) {
    for (std::size_t q = 0; q < spec_.n_queries; ++q) {
      const std::size_t target = query_target(ds, q);
      const MatrixF keys = page_keys(ds, target);
      std::mt19937_64 rng(derive(spec_.seed, kQueries, ds, q));
      MatrixF tokens(static_cast<Eigen::Index>(spec_.query_tokens), spec_.dim);
      MatrixF jitter = gaussian_rows(rng, tokens.rows(), tokens.cols());
      for (Eigen::Index t = 0; t < tokens.rows(); ++t)
        tokens.row(t) = keys.row(t % keys.rows()) + noise_scale * jitter.row(t);
      if (spec_.normalize) normalize_rows(tokens);
      out.push_back({query_id(ds, q), dataset_id(ds), std::move(tokens)});
    }
  }
  return out;
}

EmbeddingBundle SyntheticCorpus::query_bundle() const {
  EmbeddingBundle b;
  b.dim = spec_.dim;
  for (auto& q : queries()) {
    EmbeddingPage page;
    page.page_id = q.query_id;
    page.dataset_id = q.dataset_id;
    page.raw.layout = FixedGrid{static_cast<std::uint32_t>(q.tokens.rows()), 1};
    page.raw.vectors = std::move(q.tokens);
    b.pages.push_back(std::move(page));
  }
  return b;
}

QrelSet SyntheticCorpus::qrels() const {
  QrelSet qrels;
  for (std::size_t ds = 0; ds < spec_.n_datasets; ++ds)
    for (std::size_t q = 0; q < spec_.n_queries; ++q) qrels[query_id(ds, q)][page_id(query_target(ds, q))] = 1;
  return qrels;
}

}  // namespace lipool
