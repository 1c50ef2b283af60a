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

#include "lipool/pooling.hpp"

#include <map>

namespace lipool {

void SmoothingKernel::validate() const {
  if (window < 1 || window % 2 == 0)
    throw InvalidArgument("smoothing window must be odd and >= 1, got " + std::to_string(window));
  if (kind == KernelKind::gaussian && !(effective_sigma() > 0.0))
    throw InvalidArgument("gaussian sigma must be > 0");
}

std::vector<double> SmoothingKernel::weights() const {
  validate();
  const int r = radius();
  std::vector<double> w(static_cast<std::size_t>(r) + 1);
  const double sigma = effective_sigma();
  for (int delta = 0; delta <= r; ++delta) {
    w[static_cast<std::size_t>(delta)] = kind == KernelKind::gaussian
                                             ? std::exp(-double(delta * delta) / (2.0 * sigma * sigma))
                                             : double(r + 1 - delta);
  }
  return w;
}

std::vector<double> SmoothingKernel::window_weights() const {
  const auto half = weights();
  const int r = radius();
  std::vector<double> full;
  full.reserve(static_cast<std::size_t>(window));
  for (int offset = -r; offset <= r; ++offset) full.push_back(half[static_cast<std::size_t>(std::abs(offset))]);
  return full;
}

std::string_view to_string(SmoothingMode mode) {
  switch (mode) {
    case SmoothingMode::none:
      return "none";
    case SmoothingMode::conv1d:
      return "conv1d";
    case SmoothingMode::gaussian:
      return "gauss";
    case SmoothingMode::triangular:
      return "tri";
  }
  return "none";
}

SmoothingMode parse_smoothing_mode(std::string_view name) {
  if (name == "none" || name.empty()) return SmoothingMode::none;
  if (name == "conv1d") return SmoothingMode::conv1d;
  if (name == "gauss" || name == "gaussian") return SmoothingMode::gaussian;
  if (name == "tri" || name == "triangular") return SmoothingMode::triangular;
  throw InvalidArgument("unknown smoothing strategy '" + std::string(name) + "' (expected none, conv1d, gauss, tri)");
}

std::optional<SmoothingKernel> PoolingOptions::kernel() const {
  if (smoothing != SmoothingMode::gaussian && smoothing != SmoothingMode::triangular) return std::nullopt;
  SmoothingKernel k;
  k.kind = smoothing == SmoothingMode::gaussian ? KernelKind::gaussian : KernelKind::triangular;
  k.window = window;
  k.sigma = sigma;
  return k;
}

void PoolingOptions::validate() const {
  if (window < 1 || window % 2 == 0) throw InvalidArgument("pooling window must be odd and >= 1");
  if (sigma && !(*sigma > 0.0)) throw InvalidArgument("gaussian sigma must be > 0");
  if (max_rows && *max_rows < 1) throw InvalidArgument("max pooled rows T must be >= 1");
}

NamedVectors pool_page(const PatchEmbeddingSet& set, const ModelProfile& profile, const PoolingOptions& options) {
  options.validate();
  if (family_of(set.layout()) != profile.layout_family) {
    throw DataError("page '" + set.page_id() + "': layout " + describe(set.layout()) + " does not match profile '" +
                    profile.name + "'");
  }

  // The whole chain runs in double and each stored vector is rounded to float
  // once, after renormalization.
  using RowsD = detail::RowMatrixD;
  const RowsD tokens = detail::widen_rows(set.vectors());
  auto smooth_rows = [&](const RowsD& rows) -> RowsD {
    if (options.smoothing == SmoothingMode::conv1d) return conv1d_extend(rows, options.window);
    return weighted_smooth(rows, *options.kernel());
  };

  std::map<std::string, RowsD, std::less<>> pooled;
  switch (profile.layout_family) {
    case LayoutFamily::tile_grid: {
      if (options.smoothing != SmoothingMode::none)
        throw InvalidArgument("smoothing is only defined for row-pooled layouts (profile '" + profile.name + "')");
      pooled[std::string(vector_names::mean_pooling)] =
          group_mean_rows(tokens, std::get<TileGrid>(set.layout()).patches_per_tile);
      break;
    }
    case LayoutFamily::fixed_grid: {
      const auto& grid = std::get<FixedGrid>(set.layout());
      RowsD rows = grid_row_means(tokens, grid.height, grid.width);
      if (options.smoothing != SmoothingMode::none) pooled[std::string(vector_names::smoothed)] = smooth_rows(rows);
      pooled[std::string(vector_names::mean_pooling)] = std::move(rows);
      break;
    }
    case LayoutFamily::merged_grid: {
      const auto& grid = std::get<MergedGrid>(set.layout());
      const Eigen::Index t = options.max_rows.value_or(profile.max_pooled_rows);
      const RowsD rows = grid_row_means(tokens, grid.h_eff, grid.w_eff);
      if (options.smoothing != SmoothingMode::none) pooled[std::string(vector_names::smoothed)] = bin_rows(smooth_rows(rows), t);
      pooled[std::string(vector_names::mean_pooling)] = bin_rows(rows, t);
      break;
    }
  }
  pooled[std::string(vector_names::global_pooling)] = tokens.colwise().mean();

  NamedVectors out;
  out.emplace(vector_names::initial, set.vectors());
  for (auto& [name, rows] : pooled) {
    if (options.renormalize) normalize_rows(rows);
    out.emplace(name, detail::narrow_rows<float>(rows));
  }
  return out;
}

}  // namespace lipool
