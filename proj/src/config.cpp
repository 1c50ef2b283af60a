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

#include "lipool/config.hpp"

#include <initializer_list>
#include <string_view>

#include "lipool/binary_io.hpp"

namespace lipool {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::string_view section, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw InvalidArgument("config: '" + std::string(section) + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw InvalidArgument("config: unknown key '" + key + "' in '" + std::string(section) + "'");
  }
}

template <class T>
void read_if(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (profile.dim < 1) throw InvalidArgument("profile dim must be >= 1");
  if (profile.max_pooled_rows < 1) throw InvalidArgument("profile max_pooled_rows must be >= 1");
  pooling.validate();
  if (auto k = pooling.kernel()) k->validate();
  search.validate();
  if (threads < 0) throw InvalidArgument("threads must be >= 0");
}

json to_json(const ModelProfile& p) {
  return {{"name", p.name},
          {"dim", p.dim},
          {"layout_family", std::string(to_string(p.layout_family))},
          {"prefix_nonvisual", p.prefix_nonvisual},
          {"suffix_nonvisual", p.suffix_nonvisual},
          {"default_pooling", p.default_pooling},
          {"max_pooled_rows", p.max_pooled_rows}};
}

json to_json(const PoolingOptions& p) {
  json j = {{"smoothing", std::string(to_string(p.smoothing))}, {"window", p.window}, {"renormalize", p.renormalize}};
  j["sigma"] = p.sigma ? json(*p.sigma) : json(nullptr);
  j["max_rows"] = p.max_rows ? json(*p.max_rows) : json(nullptr);
  return j;
}

json to_json(const SearchConfig& c) {
  return {{"stages", c.stages},
          {"stage1_vector", c.stage1_vector},
          {"prefetch_k", c.prefetch_k},
          {"global_prefetch_k", c.global_prefetch_k},
          {"top_k", c.top_k}};
}

json to_json(const PipelineConfig& c) {
  return {{"profile", to_json(c.profile)},
          {"pooling", to_json(c.pooling)},
          {"search", to_json(c.search)},
          {"seed", c.seed},
          {"threads", c.threads}};
}

ModelProfile profile_from_json(const json& j, ModelProfile base) {
  if (j.is_string()) return profile_by_name(j.get<std::string>());
  reject_unknown(j, "profile", {"name", "base", "dim", "layout_family", "prefix_nonvisual", "suffix_nonvisual",
                                "default_pooling", "max_pooled_rows"});
  if (j.contains("base")) base = profile_by_name(j.at("base").get<std::string>());
  read_if(j, "name", base.name);
  read_if(j, "dim", base.dim);
  if (j.contains("layout_family")) base.layout_family = parse_layout_family(j.at("layout_family").get<std::string>());
  read_if(j, "prefix_nonvisual", base.prefix_nonvisual);
  read_if(j, "suffix_nonvisual", base.suffix_nonvisual);
  read_if(j, "default_pooling", base.default_pooling);
  read_if(j, "max_pooled_rows", base.max_pooled_rows);
  return base;
}

PoolingOptions pooling_from_json(const json& j, PoolingOptions base) {
  reject_unknown(j, "pooling", {"smoothing", "window", "sigma", "max_rows", "renormalize"});
  if (j.contains("smoothing")) base.smoothing = parse_smoothing_mode(j.at("smoothing").get<std::string>());
  read_if(j, "window", base.window);
  if (j.contains("sigma")) base.sigma = j.at("sigma").is_null() ? std::nullopt : std::optional(j.at("sigma").get<double>());
  if (j.contains("max_rows"))
    base.max_rows = j.at("max_rows").is_null() ? std::nullopt : std::optional(j.at("max_rows").get<std::uint32_t>());
  read_if(j, "renormalize", base.renormalize);
  return base;
}

SearchConfig search_from_json(const json& j, SearchConfig base) {
  reject_unknown(j, "search", {"stages", "stage1_vector", "prefetch_k", "global_prefetch_k", "top_k"});
  read_if(j, "stages", base.stages);
  read_if(j, "stage1_vector", base.stage1_vector);
  read_if(j, "prefetch_k", base.prefetch_k);
  read_if(j, "global_prefetch_k", base.global_prefetch_k);
  read_if(j, "top_k", base.top_k);
  return base;
}

PipelineConfig pipeline_from_json(const json& j, PipelineConfig base) {
  reject_unknown(j, "config", {"profile", "pooling", "search", "seed", "threads"});
  if (j.contains("profile")) base.profile = profile_from_json(j.at("profile"), base.profile);
  if (j.contains("pooling")) base.pooling = pooling_from_json(j.at("pooling"), base.pooling);
  if (j.contains("search")) base.search = search_from_json(j.at("search"), base.search);
  read_if(j, "seed", base.seed);
  read_if(j, "threads", base.threads);
  base.search.threads = base.threads;
  base.validate();
  return base;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config '" + path.string() + "': " + e.what());
  }
  return pipeline_from_json(j);
}

}  // namespace lipool
