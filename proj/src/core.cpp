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

#include "lipool/core.hpp"

#include <sstream>

namespace lipool {

namespace {
template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;
}  // namespace

LayoutFamily family_of(const GridLayout& layout) {
  return static_cast<LayoutFamily>(layout.index());
}

std::string_view to_string(LayoutFamily family) {
  switch (family) {
    case LayoutFamily::fixed_grid:
      return "fixed_grid";
    case LayoutFamily::tile_grid:
      return "tile_grid";
    case LayoutFamily::merged_grid:
      return "merged_grid";
  }
  return "unknown";
}

LayoutFamily parse_layout_family(std::string_view name) {
  if (name == "fixed_grid" || name == "fixed") return LayoutFamily::fixed_grid;
  if (name == "tile_grid" || name == "tile") return LayoutFamily::tile_grid;
  if (name == "merged_grid" || name == "merged") return LayoutFamily::merged_grid;
  throw InvalidArgument("unknown layout family '" + std::string(name) + "'");
}

std::uint64_t expected_token_count(const GridLayout& layout) {
  return std::visit(
      overloaded{
          [](const FixedGrid& g) { return std::uint64_t{g.height} * g.width; },
          [](const TileGrid& g) {
            const std::uint64_t tiles =
                std::uint64_t{g.n_rows} * g.n_cols + (g.has_global_tile ? 1u : 0u);
            return tiles * g.patches_per_tile;
          },
          [](const MergedGrid& g) { return std::uint64_t{g.h_eff} * g.w_eff; },
      },
      layout);
}

std::string describe(const GridLayout& layout) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const FixedGrid& g) { os << "FixedGrid{" << g.height << "x" << g.width << "}"; },
                 [&](const TileGrid& g) {
                   os << "TileGrid{" << g.n_rows << "x" << g.n_cols << ", P=" << g.patches_per_tile
                      << (g.has_global_tile ? ", global" : "") << "}";
                 },
                 [&](const MergedGrid& g) { os << "MergedGrid{" << g.h_eff << "x" << g.w_eff << "}"; },
             },
             layout);
  return os.str();
}

std::optional<std::string> validate_layout(const GridLayout& layout, std::int64_t token_count) {
  if (token_count < 1) return "token count must be >= 1, got " + std::to_string(token_count);
  const std::uint64_t expected = expected_token_count(layout);
  if (expected != static_cast<std::uint64_t>(token_count)) {
    return describe(layout) + " implies " + std::to_string(expected) + " tokens, set has " +
           std::to_string(token_count);
  }
  return std::nullopt;
}

ModelProfile colpali_profile() {
  ModelProfile p;
  p.name = "colpali";
  p.dim = 128;
  p.layout_family = LayoutFamily::fixed_grid;
  // Placement of the 6 non-visual tokens is configurable. Verify it against
  // the real processor before ingesting encoder output.
  p.prefix_nonvisual = 0;
  p.suffix_nonvisual = 6;
  p.default_pooling = "row_mean";
  return p;
}

ModelProfile colsmol_profile() {
  ModelProfile p;
  p.name = "colsmol";
  p.dim = 128;
  p.layout_family = LayoutFamily::tile_grid;
  p.default_pooling = "tile_mean";
  return p;
}

ModelProfile colqwen_profile() {
  ModelProfile p;
  p.name = "colqwen";
  p.dim = 128;
  p.layout_family = LayoutFamily::merged_grid;
  p.default_pooling = "adaptive";
  p.max_pooled_rows = 32;
  return p;
}

ModelProfile profile_by_name(std::string_view name) {
  if (name == "colpali") return colpali_profile();
  if (name == "colsmol") return colsmol_profile();
  if (name == "colqwen") return colqwen_profile();
  throw InvalidArgument("unknown model profile '" + std::string(name) + "'");
}

std::vector<std::string> builtin_profile_names() { return {"colpali", "colsmol", "colqwen"}; }

bool is_known_vector_name(std::string_view name) {
  return name == vector_names::initial || name == vector_names::mean_pooling ||
         name == vector_names::smoothed || name == vector_names::global_pooling;
}

}  // namespace lipool
