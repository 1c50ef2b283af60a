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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "lipool/error.hpp"
#include "lipool/matrix.hpp"

namespace lipool {

// ---------------------------------------------------------------------------
// Spatial layouts of visual tokens
// ---------------------------------------------------------------------------

/// Fixed patch grid, tokens in row-major order (ColPali-style 32x32).
struct FixedGrid {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  bool operator==(const FixedGrid&) const = default;
};

/// Tiling processor output: n_rows*n_cols tiles of `patches_per_tile`
/// consecutive tokens each, optionally followed by one global tile.
struct TileGrid {
  std::uint32_t n_rows = 0;
  std::uint32_t n_cols = 0;
  std::uint32_t patches_per_tile = 0;
  bool has_global_tile = false;

  std::uint32_t tile_count() const { return n_rows * n_cols + (has_global_tile ? 1u : 0u); }
  bool operator==(const TileGrid&) const = default;
};

/// Dynamic-resolution grid after a 2x2 patch merger, row-major.
struct MergedGrid {
  std::uint32_t h_eff = 0;
  std::uint32_t w_eff = 0;
  bool operator==(const MergedGrid&) const = default;
};

using GridLayout = std::variant<FixedGrid, TileGrid, MergedGrid>;

enum class LayoutFamily : std::uint8_t { fixed_grid = 0, tile_grid = 1, merged_grid = 2 };

LayoutFamily family_of(const GridLayout& layout);
std::string_view to_string(LayoutFamily family);
LayoutFamily parse_layout_family(std::string_view name);

/// Number of tokens the layout describes.
std::uint64_t expected_token_count(const GridLayout& layout);

std::string describe(const GridLayout& layout);

/// Returns std::nullopt when `token_count` is consistent with `layout`,
/// otherwise a human-readable description of the violation.
std::optional<std::string> validate_layout(const GridLayout& layout, std::int64_t token_count);

// ---------------------------------------------------------------------------
// Embedding sets
// ---------------------------------------------------------------------------

/// A page's visual tokens (D x d) together with their spatial layout.
/// Construction enforces D >= 1, finite entries and layout consistency.
template <class Scalar>
class BasicPatchEmbeddingSet {
 public:
  using Matrix = RowMatrix<Scalar>;

  BasicPatchEmbeddingSet(Matrix vectors, GridLayout layout, std::string page_id = {})
      : vectors_(std::move(vectors)), layout_(layout), page_id_(std::move(page_id)) {
    if (vectors_.rows() < 1) throw DataError("page '" + page_id_ + "': embedding set is empty");
    if (!all_finite(vectors_))
      throw DataError("page '" + page_id_ + "': embedding set contains non-finite values");
    if (auto violation = validate_layout(layout_, vectors_.rows()))
      throw DataError("page '" + page_id_ + "': " + *violation);
  }

  const Matrix& vectors() const { return vectors_; }
  const GridLayout& layout() const { return layout_; }
  const std::string& page_id() const { return page_id_; }
  Eigen::Index size() const { return vectors_.rows(); }
  Eigen::Index dim() const { return vectors_.cols(); }

 private:
  Matrix vectors_;
  GridLayout layout_;
  std::string page_id_;
};

using PatchEmbeddingSet = BasicPatchEmbeddingSet<float>;

// ---------------------------------------------------------------------------
// Model profiles
// ---------------------------------------------------------------------------

/// Per-backbone rules for hygiene and pooling.
struct ModelProfile {
  std::string name;
  std::uint32_t dim = 128;
  LayoutFamily layout_family = LayoutFamily::fixed_grid;
  std::uint32_t prefix_nonvisual = 0;
  std::uint32_t suffix_nonvisual = 0;
  std::string default_pooling = "row_mean";
  std::uint32_t max_pooled_rows = 32;  // merged_grid only
};

/// ColPali v1.3: 32x32 fixed grid, d=128. The six non-visual tokens are
/// placed after the image tokens (`<bos>Describe the image.\n` follows the
/// image placeholders in the processor prompt). Configurable; verify against
/// the real processor before relying on the heuristic path.
ModelProfile colpali_profile();

/// ColSmol-500M: tiles of 64 patches plus a global tile. Tile separator
/// tokens are interleaved, so use a visual mask rather than prefix/suffix.
ModelProfile colsmol_profile();

/// ColQwen2.5: merged dynamic grid, adaptive row pooling to T=32.
ModelProfile colqwen_profile();

/// Looks up a built-in profile by name (`colpali`, `colsmol`, `colqwen`).
ModelProfile profile_by_name(std::string_view name);

std::vector<std::string> builtin_profile_names();

// ---------------------------------------------------------------------------
// Raw model output and named vectors
// ---------------------------------------------------------------------------

/// Everything an encoder emitted for one page, before hygiene.
struct RawModelOutput {
  MatrixF vectors;                              // T_total x d
  std::optional<std::vector<bool>> visual_mask;  // true = visual patch token
  GridLayout layout = FixedGrid{};               // layout of the visual tokens

  Eigen::Index total_tokens() const { return vectors.rows(); }
};

namespace vector_names {
inline constexpr std::string_view initial = "initial";
inline constexpr std::string_view mean_pooling = "mean_pooling";
inline constexpr std::string_view smoothed = "smoothed";
inline constexpr std::string_view global_pooling = "global_pooling";
}  // namespace vector_names

bool is_known_vector_name(std::string_view name);

}  // namespace lipool
