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

#include <catch_amalgamated.hpp>

#include <sstream>

#include "commands.hpp"
#include "lipool/binary_io.hpp"
#include "lipool/preprocess.hpp"
#include "lipool/trec.hpp"
#include "oracles.hpp"

using namespace lipool;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lipool");
  std::ostringstream out, err;
  const int code = lipool::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("gen, index, search and eval end to end") {
  oracle::TempDir dir("cli");
  const std::string d = dir.path.string();
  auto r = run_cli({"gen", "--out-dir", d, "--pages", "40", "--queries", "5", "--noise", "0.2", "--seed", "3"});
  REQUIRE(r.code == 0);
  r = run_cli({"index", "--in", d + "/synth0.leb", "--out", d + "/s.lix", "--smoothing", "conv1d"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\"failed_pages\": 0") != std::string::npos);

  r = run_cli({"search", "--index", d + "/s.lix", "--queries", d + "/queries.leb", "--top-k", "3", "--prefetch-k", "10",
           "--jsonl", d + "/run.jsonl"});
  REQUIRE(r.code == 0);
  const auto runs = parse_trec_run(r.out);
  CHECK(runs.size() == 5);
  CHECK(runs[0].second.size() == 3);
  CHECK(std::filesystem::exists(dir / "run.jsonl"));

  r = run_cli({"eval", "--index", d + "/s.lix", "--queries", d + "/queries.leb", "--qrels", d + "/qrels.tsv", "--no-qps",
           "--report", d + "/rep.json"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("N@10") != std::string::npos);
  CHECK(nlohmann::json::parse(io::read_file(dir / "rep.json"))[0]["means"].contains("ndcg@10"));

  r = run_cli({"bench", "--index", d + "/s.lix", "--queries", d + "/queries.leb", "--stages-list", "1,2", "--prefetch-k",
           "10", "--top-k", "5", "--repeats", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("speedup") != std::string::npos);
}

TEST_CASE("flags override the config file") {
  oracle::TempDir dir("cli-cfg");
  const std::string d = dir.path.string();
  REQUIRE(run_cli({"gen", "--out-dir", d, "--pages", "12", "--queries", "2"}).code == 0);
  io::write_file(dir / "cfg.json", R"({"pooling": {"smoothing": "conv1d"}, "search": {"top_k": 7, "prefetch_k": 9}})");
  REQUIRE(run_cli({"index", "--in", d + "/synth0.leb", "--out", d + "/s.lix", "--config", d + "/cfg.json"}).code == 0);
  auto r = run_cli({"search", "--index", d + "/s.lix", "--queries", d + "/queries.leb", "--config", d + "/cfg.json",
                "--top-k", "2"});
  REQUIRE(r.code == 0);
  CHECK(parse_trec_run(r.out)[0].second.size() == 2);
  r = run_cli({"search", "--index", d + "/s.lix", "--queries", d + "/queries.leb", "--config", d + "/cfg.json",
           "--stage1-vector", "smoothed"});
  CHECK(r.code == 0);
  CHECK(parse_trec_run(r.out)[0].second.size() == 7);
}

TEST_CASE("exit codes") {
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"frobnicate"}).code == 1);
  CHECK(run_cli({"search", "--index"}).code == 1);
  CHECK(run_cli({"--help"}).code == 0);

  oracle::TempDir dir("cli-err");
  const std::string d = dir.path.string();
  io::write_file(dir / "junk.leb", "not an embedding file");
  auto r = run_cli({"index", "--in", d + "/junk.leb", "--out", d + "/x.lix"});
  CHECK(r.code == 2);
  CHECK(r.err.find("magic") != std::string::npos);

  REQUIRE(run_cli({"gen", "--out-dir", d, "--pages", "4", "--queries", "1"}).code == 0);
  r = run_cli({"index", "--in", d + "/synth0.leb", "--out", d + "/x.lix", "--profile", "colsmol"});
  CHECK(r.code == 2);
  r = run_cli({"index", "--in", d + "/synth0.leb", "--out", d + "/x.lix", "--smoothing", "median"});
  CHECK(r.code == 1);
  r = run_cli({"search", "--index", d + "/synth0.leb", "--queries", d + "/queries.leb"});
  CHECK(r.code == 2);
}

TEST_CASE("crop command") {
  oracle::TempDir dir("cli-crop");
  RasterImage img(100, 80, 255);
  img.pixels().block(10, 20, 50, 30).setZero();
  write_pgm(dir / "in.pgm", img);
  auto r = run_cli({"crop", "--in", (dir / "in.pgm").string(), "--out", (dir / "out.pgm").string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["top"] == 10);
  CHECK(j["right"] == 50);
  CHECK(read_pnm(dir / "out.pgm").height() == 50);
}

TEST_CASE("cost command") {
  auto r = run_cli({"cost", "--pages", "10000", "--variant", "colpali:1024:32", "--json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j[0]["multiply_adds_full"] == 13107200000ULL);
  CHECK(j[0]["ratio"] == 32.0);
  CHECK(run_cli({"cost", "--variant", "nope"}).code == 1);
}
