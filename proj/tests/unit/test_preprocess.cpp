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

#include <random>

#include "images.hpp"
#include "lipool/preprocess.hpp"
#include "oracles.hpp"

using namespace lipool;

TEST_CASE("black block is cropped to its bounding box") {
  const auto img = images::black_block(200, 150, 40, 120, 30, 100);
  const auto res = crop_empty_regions(img);
  CHECK(res.rect == CropRect{40, 120, 30, 100});
  CHECK(res.image.height() == 80);
  CHECK(res.image.width() == 70);
  CHECK((res.image.pixels() == 0).all());
  CHECK_FALSE(res.strip_removed);
}

TEST_CASE("row and column std match a two-pass oracle") {
  std::mt19937_64 rng(5);
  const auto img = images::noisy_page(rng, 6);
  const auto s = row_col_std(img);
  for (long y = 0; y < img.height(); ++y) {
    double m = 0, v = 0;
    for (long x = 0; x < img.width(); ++x) m += img(y, x);
    m /= double(img.width());
    for (long x = 0; x < img.width(); ++x) v += (img(y, x) - m) * (img(y, x) - m);
    CHECK(s.rows(y) == Catch::Approx(std::sqrt(v / double(img.width()))).epsilon(1e-12).margin(1e-12));
  }
}

TEST_CASE("blank and low-variance pages are kept whole") {
  const RasterImage blank(100, 80, 255);
  CHECK(crop_empty_regions(blank).rect == CropRect{0, 100, 0, 80});
  RasterImage faint(100, 80, 200);
  faint.pixels()(50, 40) = 201;  // std far below 4
  CHECK(crop_empty_regions(faint).rect == CropRect{0, 100, 0, 80});
}

TEST_CASE("tiny content below min_keep falls back to the full page") {
  const auto img = images::black_block(200, 200, 100, 105, 100, 105);
  CHECK(crop_empty_regions(img).rect == CropRect{0, 200, 0, 200});
  CropConfig loose;
  loose.min_keep_fraction = 0.01;
  CHECK(crop_empty_regions(img, loose).rect == CropRect{100, 105, 100, 105});
}

TEST_CASE("isolated page number in the bottom strip is ignored") {
  auto img = images::black_block(200, 160, 20, 150, 20, 140);
  img.pixels().block(192, 76, 5, 6).setZero();  // narrow mark in the last 6%
  const auto res = crop_empty_regions(img);
  CHECK(res.strip_removed);
  CHECK(res.rect == CropRect{20, 150, 20, 140});

  CropConfig off;
  off.strip_enabled = false;
  CHECK(crop_empty_regions(img, off).rect == CropRect{20, 197, 20, 140});
}

TEST_CASE("wide footers are content, not page numbers") {
  auto img = images::black_block(200, 160, 20, 150, 20, 140);
  img.pixels().block(192, 20, 4, 120).setZero();
  const auto res = crop_empty_regions(img);
  CHECK_FALSE(res.strip_removed);
  CHECK(res.rect == CropRect{20, 196, 20, 140});
}

TEST_CASE("crop is idempotent on textured pages") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 30; ++i) {
    const auto img = images::textured_page(rng);
    const auto once = crop_empty_regions(img);
    const auto twice = crop_empty_regions(once.image);
    CHECK(twice.rect == CropRect{0, once.image.height(), 0, once.image.width()});
    CHECK(twice.image == once.image);
  }
}

TEST_CASE("raising thresholds never grows the detected box") {
  std::mt19937_64 rng(22);
  CropConfig cfg;
  cfg.strip_enabled = false;
  for (int i = 0; i < 30; ++i) {
    const auto img = images::noisy_page(rng, std::uniform_int_distribution<int>(0, 8)(rng));
    double a = std::uniform_real_distribution<double>(0, 40)(rng);
    double b = std::uniform_real_distribution<double>(0, 40)(rng);
    if (a > b) std::swap(a, b);
    cfg.row_std_thresh = cfg.col_std_thresh = a;
    const auto low = detect_content_box(img, cfg);
    cfg.row_std_thresh = cfg.col_std_thresh = b;
    const auto high = detect_content_box(img, cfg);
    if (high.rect) {
      REQUIRE(low.rect);
      CHECK(low.rect->contains(*high.rect));
    }
  }
}

TEST_CASE("detection matches the variance oracle without strip logic") {
  std::mt19937_64 rng(23);
  CropConfig cfg;
  cfg.strip_enabled = false;
  for (int i = 0; i < 20; ++i) {
    const auto img = images::noisy_page(rng, 5);
    cfg.row_std_thresh = std::uniform_real_distribution<double>(0, 30)(rng);
    cfg.col_std_thresh = std::uniform_real_distribution<double>(0, 30)(rng);
    const auto box = detect_content_box(img, cfg);
    const auto want = oracle::variance_box(img, cfg.row_std_thresh, cfg.col_std_thresh);
    REQUIRE(bool(box.rect) == (want.top >= 0));
    if (box.rect) CHECK(*box.rect == CropRect{want.top, want.bottom, want.left, want.right});
  }
}

TEST_CASE("crop config validation") {
  CropConfig c;
  c.min_keep_fraction = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.row_std_thresh = -1;
  CHECK_THROWS_AS(crop_empty_regions(RasterImage(4, 4), c), InvalidArgument);
}

TEST_CASE("pnm round trip and rgb luma") {
  std::mt19937_64 rng(24);
  const auto img = images::noisy_page(rng, 3);
  CHECK(decode_pnm(encode_pgm(img)) == img);

  const std::string ppm = std::string("P6\n# comment\n2 1\n255\n") + std::string("\xff\x00\x00\x00\x00\xff", 6);
  const auto rgb = decode_pnm(ppm);
  CHECK(rgb(0, 0) == 76);  // round(0.299 * 255)
  CHECK(rgb(0, 1) == 29);  // round(0.114 * 255)
  CHECK_THROWS_AS(decode_pnm("P3\n1 1\n255\n0 0 0"), DataError);
  CHECK_THROWS_AS(decode_pnm("P5\n4 4\n255\nab"), DataError);
}
