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

// Token hygiene: keep only visual patch tokens of a raw encoder output.
//
// Two paths select the visual rows:
//   mask      rows whose visual_mask entry is true (any pattern, order kept)
//   heuristic rows in [prefix, T_total - suffix - padding), where padding is
//             the trailing run of exactly-zero rows
// The mask path wins whenever a mask is present.

#include <cstdint>
#include <string>

#include "lipool/core.hpp"

namespace lipool {

/// Length of the maximal trailing run of rows whose components are all 0.0.
std::int64_t detect_padding(const MatrixF& vectors);

inline std::int64_t detect_padding(const RawModelOutput& raw) { return detect_padding(raw.vectors); }

/// Returns the visual-only embedding set. Throws DataError when nothing
/// visual remains or the result disagrees with the page layout / profile.
PatchEmbeddingSet strip_nonvisual(const RawModelOutput& raw, const ModelProfile& profile,
                                  const std::string& page_id = {});

}  // namespace lipool
