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

// Training-free spatial pooling of patch embeddings.
//
// Matrix kernels take any Eigen expression with one token per row and return
// a row-major matrix of the same scalar type. All kernels are weighted means
// with non-negative weights, so outputs stay inside the convex hull of their
// inputs. None of them renormalize; pool_page does that for stored vectors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "lipool/core.hpp"

namespace lipool {

// ---------------------------------------------------------------------------
// Smoothing kernels
// ---------------------------------------------------------------------------

enum class KernelKind { gaussian, triangular };

struct SmoothingKernel {
  KernelKind kind = KernelKind::gaussian;
  int window = 3;               // odd, >= 1
  std::optional<double> sigma;  // gaussian only; default max(0.5, r/2)

  int radius() const { return (window - 1) / 2; }
  double effective_sigma() const { return sigma.value_or(std::max(0.5, radius() / 2.0)); }

  /// Throws InvalidArgument on an even/non-positive window or sigma <= 0.
  void validate() const;

  /// Unnormalized weights w_delta for delta = 0..r.
  ///   gaussian    w = exp(-delta^2 / (2 sigma^2))
  ///   triangular  w = (r + 1) - delta
  std::vector<double> weights() const;

  /// Full symmetric window [w_r, ..., w_0, ..., w_r].
  std::vector<double> window_weights() const;
};

// ---------------------------------------------------------------------------
// Matrix kernels
// ---------------------------------------------------------------------------

namespace detail {
using RowMatrixD = RowMatrix<double>;

// Kernels accumulate in double and round once on the way out.
template <class Derived>
RowMatrixD widen_rows(const Eigen::MatrixBase<Derived>& m) {
  if constexpr (std::is_same_v<typename Derived::Scalar, Half>) {
    return m.template cast<float>().template cast<double>();
  } else {
    return m.template cast<double>();
  }
}

template <class Scalar>
RowMatrix<Scalar> narrow_rows(const RowMatrixD& m) {
  if constexpr (std::is_same_v<Scalar, Half>) {
    return m.cast<float>().template cast<Half>();
  } else {
    return m.cast<Scalar>();
  }
}
}  // namespace detail

/// Mean of each group of `group_size` consecutive rows.
template <class Derived>
RowMatrix<typename Derived::Scalar> group_mean_rows(const Eigen::MatrixBase<Derived>& tokens,
                                                    Eigen::Index group_size) {
  if (group_size < 1 || tokens.rows() % group_size != 0)
    throw InvalidArgument("token count " + std::to_string(tokens.rows()) + " is not a multiple of group size " +
                          std::to_string(group_size));
  const detail::RowMatrixD in = detail::widen_rows(tokens);
  const Eigen::Index groups = tokens.rows() / group_size;
  detail::RowMatrixD out(groups, tokens.cols());
  for (Eigen::Index g = 0; g < groups; ++g) out.row(g) = in.middleRows(g * group_size, group_size).colwise().mean();
  return detail::narrow_rows<typename Derived::Scalar>(out);
}

/// Uniform sliding window of odd size k with boundary extension: N rows in,
/// N + 2r rows out. Output i averages rows j with |j - (i - r)| <= r that
/// fall inside [0, N).
template <class Derived>
RowMatrix<typename Derived::Scalar> conv1d_extend(const Eigen::MatrixBase<Derived>& rows, int k = 3) {
  if (rows.rows() < 1) throw InvalidArgument("conv1d_extend: empty input");
  if (k < 1 || k % 2 == 0) throw InvalidArgument("conv1d_extend: window must be odd and >= 1");
  const detail::RowMatrixD in = detail::widen_rows(rows);
  const Eigen::Index n = rows.rows();
  const Eigen::Index r = (k - 1) / 2;
  detail::RowMatrixD out(n + 2 * r, rows.cols());
  for (Eigen::Index i = 0; i < n + 2 * r; ++i) {
    const Eigen::Index center = i - r;
    const Eigen::Index lo = std::max<Eigen::Index>(0, center - r);
    const Eigen::Index hi = std::min<Eigen::Index>(n - 1, center + r);
    out.row(i) = in.middleRows(lo, hi - lo + 1).colwise().mean();
  }
  return detail::narrow_rows<typename Derived::Scalar>(out);
}

/// Same-length weighted smoothing. Neighbours outside [0, N) are skipped and
/// the remaining weights renormalized.
template <class Derived>
RowMatrix<typename Derived::Scalar> weighted_smooth(const Eigen::MatrixBase<Derived>& rows,
                                                    const SmoothingKernel& kernel) {
  kernel.validate();
  const std::vector<double> w = kernel.weights();
  const detail::RowMatrixD in = detail::widen_rows(rows);
  const Eigen::Index n = rows.rows();
  const Eigen::Index r = kernel.radius();
  detail::RowMatrixD out = detail::RowMatrixD::Zero(n, rows.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    double z = 0.0;
    for (Eigen::Index j = std::max<Eigen::Index>(0, i - r); j <= std::min<Eigen::Index>(n - 1, i + r); ++j) {
      const double wj = w[static_cast<std::size_t>(std::abs(j - i))];
      out.row(i) += wj * in.row(j);
      z += wj;
    }
    if (z > 0.0) out.row(i) /= z;
  }
  return detail::narrow_rows<typename Derived::Scalar>(out);
}

/// Downsamples N rows to min(N, T) by averaging evenly spaced bins
/// [floor(b N / T), floor((b+1) N / T)). Never upsamples.
template <class Derived>
RowMatrix<typename Derived::Scalar> bin_rows(const Eigen::MatrixBase<Derived>& rows, Eigen::Index max_rows) {
  if (max_rows < 1) throw InvalidArgument("adaptive pooling: T must be >= 1");
  const Eigen::Index n = rows.rows();
  if (n <= max_rows) return rows;
  const detail::RowMatrixD in = detail::widen_rows(rows);
  detail::RowMatrixD out(max_rows, rows.cols());
  for (Eigen::Index b = 0; b < max_rows; ++b) {
    const Eigen::Index lo = b * n / max_rows;
    const Eigen::Index hi = (b + 1) * n / max_rows;
    out.row(b) = in.middleRows(lo, hi - lo).colwise().mean();
  }
  return detail::narrow_rows<typename Derived::Scalar>(out);
}

/// Mean over the columns of a row-major height x width token grid.
template <class Derived>
RowMatrix<typename Derived::Scalar> grid_row_means(const Eigen::MatrixBase<Derived>& tokens, Eigen::Index height,
                                                   Eigen::Index width) {
  if (height * width != tokens.rows())
    throw InvalidArgument("grid " + std::to_string(height) + "x" + std::to_string(width) + " does not match " +
                          std::to_string(tokens.rows()) + " tokens");
  return group_mean_rows(tokens, width);
}

// ---------------------------------------------------------------------------
// Set-level kernels
// ---------------------------------------------------------------------------

template <class Scalar>
struct BasicPooledSet {
  RowMatrix<Scalar> vectors;
  std::string source_strategy;
  bool renormalized = false;

  Eigen::Index size() const { return vectors.rows(); }
};

using PooledSet = BasicPooledSet<float>;

template <class Scalar>
BasicPooledSet<Scalar> tile_mean_pool(const BasicPatchEmbeddingSet<Scalar>& set) {
  const auto* tiles = std::get_if<TileGrid>(&set.layout());
  if (!tiles) throw InvalidArgument("tile_mean_pool needs a TileGrid layout, got " + describe(set.layout()));
  return {group_mean_rows(set.vectors(), tiles->patches_per_tile), "tile_mean", false};
}

template <class Scalar>
BasicPooledSet<Scalar> row_mean_pool(const BasicPatchEmbeddingSet<Scalar>& set) {
  const auto* grid = std::get_if<FixedGrid>(&set.layout());
  if (!grid) throw InvalidArgument("row_mean_pool needs a FixedGrid layout, got " + describe(set.layout()));
  return {grid_row_means(set.vectors(), grid->height, grid->width), "row_mean", false};
}

/// Column means of a merged grid, optionally smoothed, then binned to <= T rows.
template <class Scalar>
BasicPooledSet<Scalar> adaptive_row_pool(const BasicPatchEmbeddingSet<Scalar>& set, Eigen::Index max_rows,
                                         const std::optional<SmoothingKernel>& smoothing = std::nullopt) {
  const auto* grid = std::get_if<MergedGrid>(&set.layout());
  if (!grid) throw InvalidArgument("adaptive_row_pool needs a MergedGrid layout, got " + describe(set.layout()));
  RowMatrix<Scalar> rows = grid_row_means(set.vectors(), grid->h_eff, grid->w_eff);
  if (smoothing) rows = weighted_smooth(rows, *smoothing);
  return {bin_rows(rows, max_rows), smoothing ? "adaptive+smooth" : "adaptive", false};
}

/// Mean of all tokens, L2-normalized unless `normalize` is false.
template <class Scalar>
RowVector<Scalar> global_pool(const BasicPatchEmbeddingSet<Scalar>& set, bool normalize = true) {
  RowVector<Scalar> g = detail::narrow_rows<Scalar>(detail::widen_rows(set.vectors()).colwise().mean());
  if (normalize) normalize_rows(g);
  return g;
}

// ---------------------------------------------------------------------------
// Page-level dispatch
// ---------------------------------------------------------------------------

enum class SmoothingMode { none, conv1d, gaussian, triangular };

std::string_view to_string(SmoothingMode mode);
SmoothingMode parse_smoothing_mode(std::string_view name);

struct PoolingOptions {
  SmoothingMode smoothing = SmoothingMode::none;
  int window = 3;
  std::optional<double> sigma;
  std::optional<std::uint32_t> max_rows;  // overrides profile.max_pooled_rows
  bool renormalize = true;

  void validate() const;
  std::optional<SmoothingKernel> kernel() const;
};

using NamedVectors = std::map<std::string, MatrixF, std::less<>>;

/// Builds every named vector stored for a page:
///   initial         the clean tokens
///   mean_pooling    tile / row / adaptive means, by layout family
///   smoothed        conv1d or weighted smoothing of row means (on request)
///   global_pooling  one vector
NamedVectors pool_page(const PatchEmbeddingSet& set, const ModelProfile& profile, const PoolingOptions& options = {});

}  // namespace lipool
