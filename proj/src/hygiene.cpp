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

#include "lipool/hygiene.hpp"

#include <vector>

namespace lipool {

std::int64_t detect_padding(const MatrixF& vectors) {
  std::int64_t run = 0;
  for (Eigen::Index i = vectors.rows() - 1; i >= 0; --i) {
    if ((vectors.row(i).array() != 0.0f).any()) break;
    ++run;
  }
  return run;
}

PatchEmbeddingSet strip_nonvisual(const RawModelOutput& raw, const ModelProfile& profile,
                                  const std::string& page_id) {
  const Eigen::Index total = raw.total_tokens();
  const std::string where = "page '" + page_id + "': ";
  if (total == 0) throw DataError(where + "raw output has no tokens");
  if (raw.vectors.cols() != static_cast<Eigen::Index>(profile.dim)) {
    throw DataError(where + "embedding dim " + std::to_string(raw.vectors.cols()) + " does not match profile '" +
                    profile.name + "' dim " + std::to_string(profile.dim));
  }
  if (family_of(raw.layout) != profile.layout_family) {
    throw DataError(where + "layout " + describe(raw.layout) + " is not valid for profile '" + profile.name +
                    "' (" + std::string(to_string(profile.layout_family)) + ")");
  }

  std::vector<Eigen::Index> keep;
  if (raw.visual_mask) {
    const auto& mask = *raw.visual_mask;
    if (mask.size() != static_cast<std::size_t>(total)) {
      throw DataError(where + "visual mask length " + std::to_string(mask.size()) + " != T_total " +
                      std::to_string(total));
    }
    for (Eigen::Index i = 0; i < total; ++i)
      if (mask[static_cast<std::size_t>(i)]) keep.push_back(i);
  } else {
    const std::int64_t padding = detect_padding(raw.vectors);
    const std::int64_t begin = profile.prefix_nonvisual;
    const std::int64_t end = total - static_cast<std::int64_t>(profile.suffix_nonvisual) - padding;
    for (std::int64_t i = begin; i < end; ++i) keep.push_back(i);
  }

  if (keep.empty()) throw DataError(where + "no visual tokens remain after hygiene");
  if (auto violation = validate_layout(raw.layout, static_cast<std::int64_t>(keep.size())))
    throw DataError(where + "after hygiene: " + *violation);

  return PatchEmbeddingSet(raw.vectors(keep, Eigen::all), raw.layout, page_id);
}

}  // namespace lipool
