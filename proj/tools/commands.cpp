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

#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "lipool/binary_io.hpp"
#include "lipool/config.hpp"
#include "lipool/eval.hpp"
#include "lipool/hygiene.hpp"
#include "lipool/leb.hpp"
#include "lipool/parallel.hpp"
#include "lipool/pooling.hpp"
#include "lipool/preprocess.hpp"
#include "lipool/retrieval.hpp"
#include "lipool/store.hpp"
#include "lipool/synthetic.hpp"
#include "lipool/trec.hpp"

namespace lipool::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Shared option groups
// ---------------------------------------------------------------------------

// Flags that override the JSON config. Only flags actually given win.
struct ConfigFlags {
  std::string config_path;
  std::string profile;
  std::string smoothing;
  int window = 3;
  double sigma = 0.5;
  std::uint32_t max_rows = 32;
  bool no_renormalize = false;
  int stages = 2;
  std::string stage1_vector;
  std::size_t prefetch_k = 256;
  std::size_t global_prefetch_k = 1024;
  std::size_t top_k = 100;
  std::uint64_t seed = 42;
  int threads = 1;

  CLI::Option* o_profile = nullptr;
  CLI::Option* o_smoothing = nullptr;
  CLI::Option* o_window = nullptr;
  CLI::Option* o_sigma = nullptr;
  CLI::Option* o_max_rows = nullptr;
  CLI::Option* o_stages = nullptr;
  CLI::Option* o_stage1 = nullptr;
  CLI::Option* o_prefetch = nullptr;
  CLI::Option* o_global_prefetch = nullptr;
  CLI::Option* o_top_k = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_threads = nullptr;

  void add_common(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file (flags override it)")->check(CLI::ExistingFile);
    o_seed = app->add_option("--seed", seed, "Random seed recorded in reports");
    o_threads = app->add_option("--threads", threads, "Worker threads (0 = all cores)");
  }
  void add_pooling(CLI::App* app) {
    o_profile = app->add_option("--profile", profile, "Model profile: colpali, colsmol, colqwen");
    o_smoothing = app->add_option("--smoothing", smoothing, "Extra smoothed vector: none, conv1d, gauss, tri");
    o_window = app->add_option("--window", window, "Smoothing window k (odd)");
    o_sigma = app->add_option("--sigma", sigma, "Gaussian sigma (default max(0.5, r/2))");
    o_max_rows = app->add_option("--max-rows", max_rows, "Adaptive pooling row cap T");
    app->add_flag("--no-renormalize", no_renormalize, "Keep pooled vectors at their mean norm");
  }
  void add_search(CLI::App* app) {
    o_stages = app->add_option("--stages", stages, "1, 2 or 3");
    o_stage1 = app->add_option("--stage1-vector", stage1_vector, "Prefetch vector: mean_pooling or smoothed");
    o_prefetch = app->add_option("--prefetch-k", prefetch_k, "Candidates kept by the pooled stage");
    o_global_prefetch = app->add_option("--global-prefetch-k", global_prefetch_k, "Candidates kept by the global stage");
    o_top_k = app->add_option("--top-k", top_k, "Results per query");
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_pipeline_config(config_path);
    if (o_profile && o_profile->count()) cfg.profile = profile_by_name(profile);
    if (o_smoothing && o_smoothing->count()) cfg.pooling.smoothing = parse_smoothing_mode(smoothing);
    if (o_window && o_window->count()) cfg.pooling.window = window;
    if (o_sigma && o_sigma->count()) cfg.pooling.sigma = sigma;
    if (o_max_rows && o_max_rows->count()) cfg.pooling.max_rows = max_rows;
    if (no_renormalize) cfg.pooling.renormalize = false;
    if (o_stages && o_stages->count()) cfg.search.stages = stages;
    if (o_stage1 && o_stage1->count()) cfg.search.stage1_vector = stage1_vector;
    if (o_prefetch && o_prefetch->count()) cfg.search.prefetch_k = prefetch_k;
    if (o_global_prefetch && o_global_prefetch->count()) cfg.search.global_prefetch_k = global_prefetch_k;
    if (o_top_k && o_top_k->count()) cfg.search.top_k = top_k;
    if (o_seed && o_seed->count()) cfg.seed = seed;
    if (o_threads && o_threads->count()) cfg.threads = threads;
    cfg.search.threads = cfg.threads;
    cfg.validate();
    return cfg;
  }
};

std::vector<QueryEmbedding> load_queries(const fs::path& path) {
  auto bundle = read_embedding_file(path);
  std::vector<QueryEmbedding> queries;
  for (auto& page : bundle.pages) {
    QueryEmbedding q{page.page_id, page.dataset_id, {}};
    if (page.raw.visual_mask) {
      std::vector<Eigen::Index> keep;
      for (std::size_t i = 0; i < page.raw.visual_mask->size(); ++i)
        if ((*page.raw.visual_mask)[i]) keep.push_back(static_cast<Eigen::Index>(i));
      q.tokens = page.raw.vectors(keep, Eigen::all);
    } else {
      q.tokens = std::move(page.raw.vectors);
    }
    q.validate();
    queries.push_back(std::move(q));
  }
  if (queries.empty()) throw DataError("query file '" + path.string() + "' holds no queries");
  return queries;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

void setup_gen(CLI::App& app, std::ostream& out, int& status) {
  auto* cmd = app.add_subcommand("gen", "Generate a seeded synthetic corpus (LEB pages, LEB queries, qrels)");
  struct Opts {
    ConfigFlags flags;
    std::string out_dir;
    std::size_t pages = 100, datasets = 1, topics = 10, queries = 20, query_tokens = 10;
    double noise = 0.5;
    std::string grid;
    bool f16 = false;
    bool no_wrap = false;
  };
  auto o = std::make_shared<Opts>();
  o->flags.add_common(cmd);
  o->flags.o_profile = cmd->add_option("--profile", o->flags.profile, "Layout/wrapping preset: colpali, colsmol, colqwen");
  cmd->add_option("--out-dir", o->out_dir, "Output directory")->required();
  cmd->add_option("--pages", o->pages, "Pages per dataset");
  cmd->add_option("--datasets", o->datasets, "Number of datasets");
  cmd->add_option("--topics", o->topics, "Topic clusters");
  cmd->add_option("--noise", o->noise, "Token noise norm");
  cmd->add_option("--queries", o->queries, "Queries per dataset");
  cmd->add_option("--query-tokens", o->query_tokens, "Tokens per query (Q)");
  cmd->add_option("--grid", o->grid, "Fixed grid HxW override (colpali preset only)");
  cmd->add_flag("--f16", o->f16, "Store page values as FP16 in the LEB files");
  cmd->add_flag("--no-wrap", o->no_wrap, "Emit visual tokens only (no special/prompt/padding tokens)");

  cmd->callback([o, &out, &status] {
    const PipelineConfig cfg = o->flags.resolve();
    SyntheticSpec spec;
    spec.n_pages = o->pages;
    spec.n_datasets = o->datasets;
    spec.dim = cfg.profile.dim;
    spec.n_topics = o->topics;
    spec.noise = o->noise;
    spec.n_queries = o->queries;
    spec.query_tokens = o->query_tokens;
    spec.seed = cfg.seed;
    switch (cfg.profile.layout_family) {
      case LayoutFamily::fixed_grid: {
        FixedGrid g{32, 32};
        if (!o->grid.empty()) {
          unsigned h = 0, w = 0;
          if (std::sscanf(o->grid.c_str(), "%ux%u", &h, &w) != 2 || h == 0 || w == 0)
            throw InvalidArgument("--grid expects HxW, e.g. 32x32");
          g = {h, w};
        }
        spec.layout = g;
        spec.prefix_nonvisual = cfg.profile.prefix_nonvisual;
        spec.suffix_nonvisual = cfg.profile.suffix_nonvisual;
        break;
      }
      case LayoutFamily::tile_grid:
        spec.layout = TileGrid{4, 3, 64, true};
        spec.emit_mask = true;
        break;
      case LayoutFamily::merged_grid:
        spec.layout = MergedGrid{28, 26};
        spec.vary_merged_grid = true;
        spec.max_padding = 60;
        break;
    }
    if (o->no_wrap) {
      spec.prefix_nonvisual = spec.suffix_nonvisual = spec.max_padding = 0;
      spec.emit_mask = false;
    }

    const SyntheticCorpus corpus(spec);
    fs::create_directories(o->out_dir);
    json manifest = {{"seed", spec.seed},        {"profile", cfg.profile.name}, {"pages_per_dataset", spec.n_pages},
                     {"datasets", json::array()}, {"dim", spec.dim},            {"noise", spec.noise},
                     {"topics", spec.n_topics},   {"queries_per_dataset", spec.n_queries}};
    for (std::size_t ds = 0; ds < spec.n_datasets; ++ds) {
      EmbeddingBundle bundle = corpus.bundle(ds);
      if (o->f16)
        for (auto& p : bundle.pages) p.dtype = StorageType::f16;
      const fs::path path = fs::path(o->out_dir) / (corpus.dataset_id(ds) + ".leb");
      write_embedding_file(path, bundle);
      manifest["datasets"].push_back(corpus.dataset_id(ds));
      out << "wrote " << path.string() << " (" << bundle.pages.size() << " pages)\n";
    }
    write_embedding_file(fs::path(o->out_dir) / "queries.leb", corpus.query_bundle());
    write_qrels(fs::path(o->out_dir) / "qrels.tsv", corpus.qrels());
    io::write_file(fs::path(o->out_dir) / "manifest.json", manifest.dump(2) + "\n");
    out << "wrote " << (fs::path(o->out_dir) / "queries.leb").string() << " and qrels.tsv\n";
    status = kOk;
  });
}

// ---------------------------------------------------------------------------
// crop
// ---------------------------------------------------------------------------

void setup_crop(CLI::App& app, std::ostream& out, int& status) {
  auto* cmd = app.add_subcommand("crop", "Crop low-variance margins from a PGM/PPM page image");
  struct Opts {
    std::string in, out_path;
    CropConfig cfg;
    bool strip = true;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--in", o->in, "Input binary PGM (P5) or PPM (P6)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o->out_path, "Output PGM")->required();
  cmd->add_option("--row-thresh", o->cfg.row_std_thresh, "Row std-dev threshold (luma)");
  cmd->add_option("--col-thresh", o->cfg.col_std_thresh, "Column std-dev threshold (luma)");
  cmd->add_flag("--strip,!--no-strip", o->strip, "Remove an isolated page-number strip at the bottom");
  cmd->add_option("--strip-frac", o->cfg.page_number_strip_fraction, "Bottom fraction scanned for a page number");
  cmd->add_option("--min-keep", o->cfg.min_keep_fraction, "Minimum kept fraction per dimension");
  cmd->callback([o, &out, &status] {
    o->cfg.strip_enabled = o->strip;
    const RasterImage img = read_pnm(o->in);
    const CropResult result = crop_empty_regions(img, o->cfg);
    write_pgm(o->out_path, result.image);
    json j = {{"top", result.rect.top},       {"bottom", result.rect.bottom},
              {"left", result.rect.left},     {"right", result.rect.right},
              {"height", img.height()},       {"width", img.width()},
              {"strip_removed", result.strip_removed}};
    out << j.dump() << "\n";
    status = kOk;
  });
}

// ---------------------------------------------------------------------------
// index
// ---------------------------------------------------------------------------

void setup_index(CLI::App& app, std::ostream& out, std::ostream& err, int& status) {
  auto* cmd = app.add_subcommand("index", "Hygiene + pooling of a LEB file into a frozen index");
  struct Opts {
    ConfigFlags flags;
    std::string in, out_path, name;
  };
  auto o = std::make_shared<Opts>();
  o->flags.add_common(cmd);
  o->flags.add_pooling(cmd);
  cmd->add_option("--in", o->in, "Input LEB file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o->out_path, "Output index (.lix)")->required();
  cmd->callback([o, &out, &err, &status] {
    const PipelineConfig cfg = o->flags.resolve();
    const EmbeddingBundle bundle = read_embedding_file(o->in);
    if (bundle.pages.empty()) throw DataError("input '" + o->in + "' contains no pages");
    if (bundle.dim != cfg.profile.dim)
      throw DataError("input d=" + std::to_string(bundle.dim) + " but profile '" + cfg.profile.name + "' has d=" +
                      std::to_string(cfg.profile.dim));

    // Per-page work goes into fixed slots; insertion happens in file order.
    std::vector<std::optional<NamedVectors>> pooled(bundle.pages.size());
    std::vector<std::string> failures(bundle.pages.size());
    parallel_for(bundle.pages.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const auto& page = bundle.pages[i];
        try {
          const PatchEmbeddingSet clean = strip_nonvisual(page.raw, cfg.profile, page.page_id);
          pooled[i] = pool_page(clean, cfg.profile, cfg.pooling);
        } catch (const Error& e) {
          failures[i] = e.what();
        }
      }
    });

    Collection col(bundle.pages.front().dataset_id.empty() ? fs::path(o->in).stem().string()
                                                           : bundle.pages.front().dataset_id,
                   bundle.dim);
    std::size_t failed = 0;
    for (std::size_t i = 0; i < bundle.pages.size(); ++i) {
      if (!pooled[i]) {
        ++failed;
        err << "page '" << bundle.pages[i].page_id << "' failed: " << failures[i] << "\n";
        continue;
      }
      col.insert(bundle.pages[i].page_id, bundle.pages[i].dataset_id, *pooled[i]);
    }
    col.freeze();
    save_index(col, o->out_path);

    json summary = {{"index", o->out_path}, {"pages", col.size()}, {"failed_pages", failed},
                    {"profile", cfg.profile.name}, {"pooling", to_json(cfg.pooling)}};
    json counts = json::object();
    for (auto name : {vector_names::initial, vector_names::mean_pooling, vector_names::smoothed,
                      vector_names::global_pooling}) {
      if (col.vector_count(name) == 0) continue;
      std::uint64_t lo = UINT64_MAX, hi = 0;
      for (const auto& r : col.records()) {
        if (!r.has(name)) continue;
        const auto n = static_cast<std::uint64_t>(r.vectors(name).rows());
        lo = std::min(lo, n);
        hi = std::max(hi, n);
      }
      counts[std::string(name)] = {{"total", col.vector_count(name)},
                                   {"per_page_min", lo},
                                   {"per_page_max", hi},
                                   {"per_page_mean", double(col.vector_count(name)) / double(col.size())}};
    }
    summary["vector_counts"] = counts;
    out << summary.dump(2) << "\n";
    status = failed ? kDataError : kOk;
  });
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

void setup_search(CLI::App& app, std::ostream& out, std::ostream& err, int& status) {
  auto* cmd = app.add_subcommand("search", "Search an index with LEB queries; TREC run on stdout");
  struct Opts {
    ConfigFlags flags;
    std::string index, queries, run_tag = "lipool", jsonl;
    bool verbose = false;
  };
  auto o = std::make_shared<Opts>();
  o->flags.add_common(cmd);
  o->flags.add_search(cmd);
  cmd->add_option("--index", o->index, "Index file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--queries", o->queries, "Query LEB file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--run-tag", o->run_tag, "Run tag in the last TREC column");
  cmd->add_option("--jsonl", o->jsonl, "Also write JSON lines with per-stage timings");
  cmd->add_flag("--verbose", o->verbose, "Log per-stage candidate sets to stderr");
  cmd->callback([o, &out, &err, &status] {
    const PipelineConfig cfg = o->flags.resolve();
    const Collection col = load_index(o->index);
    const auto queries = load_queries(o->queries);
    std::string jsonl;
    for (const auto& q : queries) {
      SearchTrace trace;
      const RankedList run = search(col, q, cfg.search, &trace);
      out << format_trec_run(q.query_id, run, o->run_tag);
      if (!o->jsonl.empty()) jsonl += run_jsonl_record(q.query_id, run, trace, col).dump() + "\n";
      if (o->verbose) {
        err << q.query_id << ":";
        for (const auto& s : trace.stages) err << " " << s.vector_name << "=" << s.candidates.size();
        err << "\n";
        for (std::size_t s = 1; s < trace.stages.size(); ++s) {
          const auto& prev = trace.stages[s - 1].candidates;
          const bool nested = std::all_of(trace.stages[s].candidates.begin(), trace.stages[s].candidates.end(),
                                          [&](std::size_t c) { return std::find(prev.begin(), prev.end(), c) != prev.end(); });
          err << "  stage " << s << " within stage " << s - 1 << ": " << (nested ? "yes" : "NO") << "\n";
        }
      }
    }
    if (!o->jsonl.empty()) io::write_file(o->jsonl, jsonl);
    status = kOk;
  });
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

std::vector<Collection> load_indexes(const std::vector<std::string>& paths) {
  std::vector<Collection> cols;
  for (const auto& p : paths) cols.push_back(load_index(p));
  return cols;
}

void setup_eval(CLI::App& app, std::ostream& out, int& status) {
  auto* cmd = app.add_subcommand("eval", "NDCG/Recall@{5,10,100} and QPS over one or more indexes");
  struct Opts {
    ConfigFlags flags;
    std::vector<std::string> indexes;
    std::string queries, qrels, scope = "per_dataset", report, run_out;
    bool no_qps = false;
    int repeats = 3, clients = 1;
  };
  auto o = std::make_shared<Opts>();
  o->flags.add_common(cmd);
  o->flags.add_search(cmd);
  cmd->add_option("--index", o->indexes, "Index file(s), one per dataset")->required()->check(CLI::ExistingFile);
  cmd->add_option("--queries", o->queries, "Query LEB file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--qrels", o->qrels, "Qrels (query 0 page grade)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--scope", o->scope, "per_dataset or union");
  cmd->add_option("--report", o->report, "Write the EvalReport JSON here");
  cmd->add_option("--run-out", o->run_out, "Write the TREC run here");
  cmd->add_flag("--no-qps", o->no_qps, "Skip throughput measurement");
  cmd->add_option("--repeats", o->repeats, "Timed passes for QPS (median reported)");
  cmd->add_option("--clients", o->clients, "Parallel clients for QPS");
  cmd->callback([o, &out, &status] {
    const PipelineConfig cfg = o->flags.resolve();
    const auto cols = load_indexes(o->indexes);
    const auto queries = load_queries(o->queries);
    const QrelSet qrels = read_qrels(o->qrels);
    EvalOptions opts;
    opts.measure_qps = !o->no_qps;
    opts.qps_repeats = o->repeats;
    opts.qps_clients = o->clients;
    opts.threads = cfg.threads;
    opts.seed = cfg.seed;
    const auto reports = evaluate(cols, queries, qrels, cfg.search, parse_eval_scope(o->scope), opts);

    json j = json::array();
    std::string run_text;
    out << metrics_table_header() << "\n";
    for (const auto& r : reports) {
      j.push_back(r.to_json());
      const std::optional<double> qps = r.qps ? std::optional(r.qps->qps) : std::nullopt;
      out << format_metrics_row(r.collection + " (" + std::to_string(cfg.search.stages) + "-stage)", r.means, qps)
          << "\n";
      if (r.scope == EvalScope::union_all)
        for (const auto& [ds, means] : r.per_dataset_means) out << format_metrics_row("  " + ds, means, std::nullopt) << "\n";
      for (const auto& s : r.skipped) out << "  skipped " << s.query_id << ": " << s.reason << "\n";
      for (const auto& [qid, run] : r.runs) run_text += format_trec_run(qid, run, "lipool");
    }
    if (!o->report.empty()) io::write_file(o->report, j.dump(2) + "\n");
    if (!o->run_out.empty()) io::write_file(o->run_out, run_text);
    status = kOk;
  });
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchRow {
  std::string label;
  SearchConfig search;
};

std::vector<BenchRow> bench_matrix(const std::string& matrix_path, const std::string& stages_list,
                                   const SearchConfig& base) {
  std::vector<BenchRow> rows;
  if (!matrix_path.empty()) {
    const json j = json::parse(io::read_file(matrix_path));
    if (!j.is_array()) throw InvalidArgument("bench matrix must be a JSON array");
    for (const auto& entry : j) {
      BenchRow row;
      row.search = search_from_json(entry.value("search", json::object()), base);
      row.search.threads = base.threads;
      row.label = entry.value("label", std::to_string(row.search.stages) + "-stage " + row.search.stage1_vector);
      row.search.validate();
      rows.push_back(row);
    }
    return rows;
  }
  std::stringstream ss(stages_list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    BenchRow row;
    row.search = base;
    row.search.stages = std::stoi(item);
    row.label = row.search.stages == 1 ? "1-stage full" : std::to_string(row.search.stages) + "-stage " + row.search.stage1_vector;
    row.search.validate();
    rows.push_back(row);
  }
  if (rows.empty()) throw InvalidArgument("bench needs at least one configuration");
  return rows;
}

void setup_bench(CLI::App& app, std::ostream& out, int& status) {
  auto* cmd = app.add_subcommand("bench", "Compare QPS (and metrics) across search configurations");
  struct Opts {
    ConfigFlags flags;
    std::vector<std::string> indexes;
    std::string queries, qrels, matrix, stages_list = "1,2", json_out, scope = "union";
    int repeats = 3, clients = 1;
  };
  auto o = std::make_shared<Opts>();
  o->flags.add_common(cmd);
  o->flags.add_search(cmd);
  cmd->add_option("--index", o->indexes, "Index file(s); several are merged")->required()->check(CLI::ExistingFile);
  cmd->add_option("--queries", o->queries, "Query LEB file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--qrels", o->qrels, "Optional qrels for metric deltas")->check(CLI::ExistingFile);
  cmd->add_option("--matrix", o->matrix, "JSON array of {label, search:{...}}")->check(CLI::ExistingFile);
  cmd->add_option("--stages-list", o->stages_list, "Comma-separated stage counts when no matrix is given");
  cmd->add_option("--repeats", o->repeats, "Timed passes per configuration");
  cmd->add_option("--clients", o->clients, "Parallel clients");
  cmd->add_option("--json", o->json_out, "Write results as JSON");
  cmd->callback([o, &out, &status] {
    const PipelineConfig cfg = o->flags.resolve();
    auto cols = load_indexes(o->indexes);
    const Collection col = cols.size() == 1 ? std::move(cols.front()) : merge(cols, "union");
    const auto queries = load_queries(o->queries);
    const auto rows = bench_matrix(o->matrix, o->stages_list, cfg.search);
    std::optional<QrelSet> qrels;
    if (!o->qrels.empty()) qrels = read_qrels(o->qrels);

    struct Result {
      QpsReport qps;
      std::map<std::string, double> means;
    };
    std::vector<Result> results;
    for (const auto& row : rows) {
      Result res;
      res.qps = measure_qps(col, queries, row.search, o->repeats, o->clients);
      if (qrels) {
        std::vector<RankedList> runs;
        for (const auto& q : queries) runs.push_back(search(col, q, row.search));
        res.means = score_runs(col, queries, std::move(runs), *qrels, row.search).means;
      }
      results.push_back(std::move(res));
    }

    std::size_t base = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i].search.stages == 1) {
        base = i;
        break;
      }
    const double base_qps = results[base].qps.qps;

    json j = json::array();
    char line[256];
    if (qrels) {
      out << metrics_table_header() << "  speedup\n";
    } else {
      std::snprintf(line, sizeof line, "%-28s %10s %8s\n", "run", "QPS", "speedup");
      out << line;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double speedup = base_qps > 0.0 ? results[i].qps.qps / base_qps : 0.0;
      if (qrels) {
        out << format_metrics_row(rows[i].label, results[i].means, results[i].qps.qps,
                                  i == base ? nullptr : &results[base].means)
            << "  " << fmt("%.2fx", speedup) << "\n";
      } else {
        std::snprintf(line, sizeof line, "%-28s %10.2f %7.2fx\n", rows[i].label.c_str(), results[i].qps.qps, speedup);
        out << line;
      }
      json stages = json::array();
      for (const auto& s : results[i].qps.stages)
        stages.push_back({{"vector", s.vector_name}, {"mean_seconds", s.mean_seconds}});
      j.push_back({{"label", rows[i].label},
                   {"search", to_json(rows[i].search)},
                   {"qps", results[i].qps.qps},
                   {"speedup", speedup},
                   {"stages", stages},
                   {"means", results[i].means}});
    }
    if (!o->json_out.empty()) io::write_file(o->json_out, j.dump(2) + "\n");
    status = kOk;
  });
}

// ---------------------------------------------------------------------------
// cost
// ---------------------------------------------------------------------------

void setup_cost(CLI::App& app, std::ostream& out, int& status) {
  auto* cmd = app.add_subcommand("cost", "Multiply-add counts of exhaustive MaxSim scans");
  struct Opts {
    std::uint64_t pages = 10000, query_tokens = 10, dim = 128;
    std::vector<std::string> variants;
    bool as_json = false;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--pages,-N", o->pages, "Collection size N");
  cmd->add_option("--query-tokens,-Q", o->query_tokens, "Query tokens Q");
  cmd->add_option("--dim,-d", o->dim, "Embedding dimension d");
  cmd->add_option("--variant", o->variants, "label:D:D' (repeatable)");
  cmd->add_flag("--json", o->as_json, "Emit JSON");
  cmd->callback([o, &out, &status] {
    std::vector<CostVariant> variants;
    if (o->variants.empty()) {
      variants = {{"colpali row_mean", 1024, 32},
                  {"colpali conv1d", 1024, 34},
                  {"colsmol tile_mean", 832, 13},
                  {"colqwen adaptive", 743, 32}};
    }
    for (const auto& v : o->variants) {
      const auto a = v.rfind(':', v.rfind(':') - 1);
      const auto b = v.rfind(':');
      if (a == std::string::npos || b == std::string::npos || a == b)
        throw InvalidArgument("--variant expects label:D:D', got '" + v + "'");
      variants.push_back({v.substr(0, a), std::stoull(v.substr(a + 1, b - a - 1)), std::stoull(v.substr(b + 1))});
      if (variants.back().full_vectors == 0 || variants.back().pooled_vectors == 0)
        throw InvalidArgument("--variant counts must be >= 1");
    }
    const auto rows = cost_report(o->dim, o->pages, o->query_tokens, variants);
    if (o->as_json) {
      json j = json::array();
      for (const auto& r : rows)
        j.push_back({{"label", r.label},
                     {"D", r.full_vectors},
                     {"D_pooled", r.pooled_vectors},
                     {"multiply_adds_full", r.full_multiply_adds},
                     {"multiply_adds_pooled", r.pooled_multiply_adds},
                     {"ratio", r.ratio}});
      out << j.dump(2) << "\n";
    } else {
      char line[256];
      std::snprintf(line, sizeof line, "%-22s %6s %6s %18s %18s %8s\n", "variant", "D", "D'", "full madds",
                    "pooled madds", "D/D'");
      out << line;
      for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-22s %6llu %6llu %18llu %18llu %7.2fx\n", r.label.c_str(),
                      static_cast<unsigned long long>(r.full_vectors), static_cast<unsigned long long>(r.pooled_vectors),
                      static_cast<unsigned long long>(r.full_multiply_adds),
                      static_cast<unsigned long long>(r.pooled_multiply_adds), r.ratio);
        out << line;
      }
    }
    status = kOk;
  });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"lipool: pooled multi-vector late-interaction retrieval"};
  app.require_subcommand(1);
  int status = kOk;
  setup_gen(app, out, status);
  setup_crop(app, out, status);
  setup_index(app, out, err, status);
  setup_search(app, out, err, status);
  setup_eval(app, out, status);
  setup_bench(app, out, status);
  setup_cost(app, out, status);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return status;
}

}  // namespace lipool::cli
