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

#include "lipool/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <vector>

#include "lipool/binary_io.hpp"

namespace lipool {

RasterImage RasterImage::from_rgb(const std::uint8_t* rgb, Eigen::Index height, Eigen::Index width) {
  Pixels px(height, width);
  for (Eigen::Index y = 0; y < height; ++y) {
    for (Eigen::Index x = 0; x < width; ++x) {
      const std::uint8_t* p = rgb + 3 * (y * width + x);
      const double luma = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
      px(y, x) = static_cast<std::uint8_t>(std::clamp(std::lround(luma), 0L, 255L));
    }
  }
  return RasterImage(std::move(px));
}

void CropConfig::validate() const {
  if (!(row_std_thresh >= 0.0)) throw InvalidArgument("row_std_thresh must be >= 0");
  if (!(col_std_thresh >= 0.0)) throw InvalidArgument("col_std_thresh must be >= 0");
  if (!(min_keep_fraction > 0.0 && min_keep_fraction <= 1.0))
    throw InvalidArgument("min_keep_fraction must be in (0, 1]");
  if (!(page_number_strip_fraction >= 0.0 && page_number_strip_fraction <= 0.2))
    throw InvalidArgument("page_number_strip_fraction must be in [0, 0.2]");
}

namespace {

// Population std from exact integer sums: n * sum(x^2) - sum(x)^2 is an
// integer, so only the final division and square root round.
double std_from_sums(std::int64_t n, std::int64_t s1, std::int64_t s2) {
  const double num = static_cast<double>(n * s2 - s1 * s1);
  return std::sqrt(std::max(0.0, num)) / static_cast<double>(n);
}

Eigen::ArrayXd column_std(const RasterImage::Pixels& px, Eigen::Index row_count) {
  Eigen::ArrayXd out(px.cols());
  for (Eigen::Index x = 0; x < px.cols(); ++x) {
    std::int64_t s1 = 0, s2 = 0;
    for (Eigen::Index y = 0; y < row_count; ++y) {
      const std::int64_t v = px(y, x);
      s1 += v;
      s2 += v * v;
    }
    out(x) = std_from_sums(row_count, s1, s2);
  }
  return out;
}

Eigen::ArrayXd row_std(const RasterImage::Pixels& px) {
  Eigen::ArrayXd out(px.rows());
  for (Eigen::Index y = 0; y < px.rows(); ++y) {
    std::int64_t s1 = 0, s2 = 0;
    for (Eigen::Index x = 0; x < px.cols(); ++x) {
      const std::int64_t v = px(y, x);
      s1 += v;
      s2 += v * v;
    }
    out(y) = std_from_sums(px.cols(), s1, s2);
  }
  return out;
}

// True when the bottom strip holds only a narrow isolated mark (a page
// number): content columns span less than 10% of the width.
bool bottom_strip_is_page_number(const RasterImage& img, const Eigen::ArrayXd& row_stds, Eigen::Index strip_rows,
                                 double row_thresh) {
  const auto& px = img.pixels();
  Eigen::Index lo = img.width();
  Eigen::Index hi = -1;
  for (Eigen::Index y = img.height() - strip_rows; y < img.height(); ++y) {
    if (!(row_stds(y) > row_thresh)) continue;
    // The row median is the background level; a sparse mark barely moves it.
    std::vector<std::uint8_t> sorted(px.row(y).begin(), px.row(y).end());
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double background = sorted[sorted.size() / 2];
    for (Eigen::Index x = 0; x < img.width(); ++x) {
      if (std::abs(static_cast<double>(px(y, x)) - background) > row_thresh) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
  }
  if (hi < 0) return false;  // blank strip, nothing to remove
  return static_cast<double>(hi - lo + 1) < 0.1 * static_cast<double>(img.width());
}

}  // namespace

RowColStd row_col_std(const RasterImage& img) {
  return {row_std(img.pixels()), column_std(img.pixels(), img.height())};
}

RasterImage slice(const RasterImage& img, const CropRect& r) {
  return RasterImage(img.pixels().block(r.top, r.left, r.height(), r.width()));
}

ContentBox detect_content_box(const RasterImage& img, const CropConfig& cfg) {
  cfg.validate();
  const Eigen::Index h = img.height();
  const Eigen::Index w = img.width();

  ContentBox result;
  const Eigen::ArrayXd rows = row_std(img.pixels());
  Eigen::Index usable_rows = h;
  if (cfg.strip_enabled) {
    const auto strip = static_cast<Eigen::Index>(std::floor(cfg.page_number_strip_fraction * static_cast<double>(h)));
    if (strip >= 1 && strip < h && bottom_strip_is_page_number(img, rows, strip, cfg.row_std_thresh)) {
      usable_rows = h - strip;
      result.strip_removed = true;
    }
  }
  const Eigen::ArrayXd cols = column_std(img.pixels(), usable_rows);

  CropRect rect{h, -1, w, -1};
  for (Eigen::Index y = 0; y < usable_rows; ++y) {
    if (rows(y) > cfg.row_std_thresh) {
      rect.top = std::min(rect.top, y);
      rect.bottom = std::max(rect.bottom, y + 1);
    }
  }
  for (Eigen::Index x = 0; x < w; ++x) {
    if (cols(x) > cfg.col_std_thresh) {
      rect.left = std::min(rect.left, x);
      rect.right = std::max(rect.right, x + 1);
    }
  }
  if (rect.bottom >= 0 && rect.right >= 0) result.rect = rect;
  return result;
}

CropResult crop_empty_regions(const RasterImage& img, const CropConfig& cfg) {
  const ContentBox box = detect_content_box(img, cfg);
  const CropRect full{0, img.height(), 0, img.width()};
  const bool too_small =
      box.rect && (static_cast<double>(box.rect->height()) < cfg.min_keep_fraction * static_cast<double>(img.height()) ||
                   static_cast<double>(box.rect->width()) < cfg.min_keep_fraction * static_cast<double>(img.width()));
  if (!box.rect || too_small) return {full, img, box.strip_removed};
  return {*box.rect, slice(img, *box.rect), box.strip_removed};
}

// ---------------------------------------------------------------------------
// PNM I/O
// ---------------------------------------------------------------------------

namespace {

class PnmHeaderParser {
 public:
  explicit PnmHeaderParser(const std::string& bytes) : b_(bytes) {}

  long next_int() {
    skip_space_and_comments();
    if (pos_ >= b_.size() || !std::isdigit(static_cast<unsigned char>(b_[pos_])))
      throw FormatError("bad PNM header", pos_);
    long v = 0;
    while (pos_ < b_.size() && std::isdigit(static_cast<unsigned char>(b_[pos_]))) {
      v = v * 10 + (b_[pos_] - '0');
      if (v > 1'000'000) throw FormatError("PNM dimension too large", pos_);
      ++pos_;
    }
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(b_[pos_]))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& b_;
  std::size_t pos_ = 2;
};

}  // namespace

RasterImage decode_pnm(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
    throw FormatError("bad magic: expected binary PGM (P5) or PPM (P6)", 0);
  const bool rgb = bytes[1] == '6';
  PnmHeaderParser hp(bytes);
  const long width = hp.next_int();
  const long height = hp.next_int();
  const long maxval = hp.next_int();
  if (width < 1 || height < 1) throw FormatError("PNM image must be at least 1x1", hp.pos());
  if (maxval < 1 || maxval > 255) throw FormatError("only 8-bit PNM (maxval <= 255) is supported", hp.pos());
  hp.advance(1);  // single whitespace before raster
  const std::size_t channels = rgb ? 3 : 1;
  const std::size_t need = static_cast<std::size_t>(width) * height * channels;
  if (hp.pos() > bytes.size() || bytes.size() - hp.pos() < need) throw FormatError("truncated payload", bytes.size());

  const auto* data = reinterpret_cast<const std::uint8_t*>(bytes.data() + hp.pos());
  RasterImage img = rgb ? RasterImage::from_rgb(data, height, width)
                        : RasterImage(Eigen::Map<const RasterImage::Pixels>(data, height, width));
  if (maxval != 255) {
    auto& px = img.pixels();
    px = (px.cast<double>() * (255.0 / maxval)).round().min(255.0).cast<std::uint8_t>();
  }
  return img;
}

RasterImage read_pnm(const std::filesystem::path& path) { return decode_pnm(io::read_file(path)); }

std::string encode_pgm(const RasterImage& img) {
  std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.pixels().data()), static_cast<std::size_t>(img.pixels().size()));
  return out;
}

void write_pgm(const std::filesystem::path& path, const RasterImage& img) { io::write_file(path, encode_pgm(img)); }

}  // namespace lipool
