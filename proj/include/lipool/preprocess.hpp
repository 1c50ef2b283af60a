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

// Empty-region cropping of rendered pages.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "lipool/error.hpp"

namespace lipool {

/// 8-bit luma image, row-major (rows = y).
class RasterImage {
 public:
  using Pixels = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  explicit RasterImage(Pixels pixels) : pixels_(std::move(pixels)) {
    if (pixels_.rows() < 1 || pixels_.cols() < 1) throw InvalidArgument("raster image must be at least 1x1");
  }
  RasterImage(Eigen::Index height, Eigen::Index width, std::uint8_t fill = 255)
      : RasterImage(Pixels::Constant(height, width, fill)) {}

  /// Converts interleaved 8-bit RGB with 0.299/0.587/0.114 weights.
  static RasterImage from_rgb(const std::uint8_t* rgb, Eigen::Index height, Eigen::Index width);

  Eigen::Index height() const { return pixels_.rows(); }
  Eigen::Index width() const { return pixels_.cols(); }
  const Pixels& pixels() const { return pixels_; }
  Pixels& pixels() { return pixels_; }
  std::uint8_t operator()(Eigen::Index y, Eigen::Index x) const { return pixels_(y, x); }

  bool operator==(const RasterImage& other) const {
    return pixels_.rows() == other.pixels_.rows() && pixels_.cols() == other.pixels_.cols() &&
           (pixels_ == other.pixels_).all();
  }

 private:
  Pixels pixels_;
};

/// Half-open pixel rectangle [top, bottom) x [left, right).
struct CropRect {
  Eigen::Index top = 0;
  Eigen::Index bottom = 0;
  Eigen::Index left = 0;
  Eigen::Index right = 0;

  Eigen::Index height() const { return bottom - top; }
  Eigen::Index width() const { return right - left; }
  bool contains(const CropRect& o) const {
    return top <= o.top && o.bottom <= bottom && left <= o.left && o.right <= right;
  }
  bool operator==(const CropRect&) const = default;
};

struct CropConfig {
  double row_std_thresh = 4.0;
  double col_std_thresh = 4.0;
  double min_keep_fraction = 0.1;
  double page_number_strip_fraction = 0.06;
  bool strip_enabled = true;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

struct RowColStd {
  Eigen::ArrayXd rows;
  Eigen::ArrayXd cols;
};

/// Population standard deviation of every row and every column.
RowColStd row_col_std(const RasterImage& img);

struct CropResult {
  CropRect rect;
  RasterImage image;
  bool strip_removed = false;
};

struct ContentBox {
  std::optional<CropRect> rect;  // empty when no row or no column passes
  bool strip_removed = false;
};

/// Raw detection: bounding box of rows and columns whose std exceeds the
/// thresholds, with the page-number strip excluded when it applies.
ContentBox detect_content_box(const RasterImage& img, const CropConfig& cfg = {});

/// Bounding box of rows/columns whose std exceeds the thresholds. Falls back
/// to the full image when nothing passes or the box is below min_keep.
CropResult crop_empty_regions(const RasterImage& img, const CropConfig& cfg = {});

RasterImage slice(const RasterImage& img, const CropRect& rect);

/// Binary PGM (P5) or PPM (P6, converted to luma), maxval <= 255.
RasterImage read_pnm(const std::filesystem::path& path);
RasterImage decode_pnm(const std::string& bytes);
void write_pgm(const std::filesystem::path& path, const RasterImage& img);
std::string encode_pgm(const RasterImage& img);

}  // namespace lipool
