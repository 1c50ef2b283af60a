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

// JSON experiment configuration.
//
//   {
//     "profile": "colpali" | { "name": ..., "dim": 128, "layout_family": ..., ... },
//     "pooling": { "smoothing": "conv1d", "window": 3, "sigma": 0.5, "max_rows": 32, "renormalize": true },
//     "search":  { "stages": 2, "stage1_vector": "mean_pooling", "prefetch_k": 256,
//                  "global_prefetch_k": 1024, "top_k": 100 },
//     "seed": 42,
//     "threads": 1
//   }
//
// Missing keys keep their defaults. Unknown keys are rejected.

#include <cstdint>
#include <filesystem>

#include <json.hpp>

#include "lipool/core.hpp"
#include "lipool/pooling.hpp"
#include "lipool/retrieval.hpp"

namespace lipool {

struct PipelineConfig {
  ModelProfile profile = colpali_profile();
  PoolingOptions pooling;
  SearchConfig search;
  std::uint64_t seed = 42;
  int threads = 1;

  /// Re-checks cross-field constraints; throws InvalidArgument.
  void validate() const;
};

nlohmann::json to_json(const ModelProfile& p);
nlohmann::json to_json(const PoolingOptions& p);
nlohmann::json to_json(const SearchConfig& c);
nlohmann::json to_json(const PipelineConfig& c);

/// Overlays the keys present in `j` onto `base`.
ModelProfile profile_from_json(const nlohmann::json& j, ModelProfile base = colpali_profile());
PoolingOptions pooling_from_json(const nlohmann::json& j, PoolingOptions base = {});
SearchConfig search_from_json(const nlohmann::json& j, SearchConfig base = {});
PipelineConfig pipeline_from_json(const nlohmann::json& j, PipelineConfig base = {});

PipelineConfig load_pipeline_config(const std::filesystem::path& path);

}  // namespace lipool
