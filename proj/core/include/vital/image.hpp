// Copyright 2026 The ViTaL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vital {

/// Raster with interleaved channels and values in [0, 1].
class Image {
 public:
  Image() = default;
  /// channels must be 1 or 3; pixel values are clamped into [0, 1] (NaN -> 0).
  Image(std::size_t width, std::size_t height, std::size_t channels,
        std::vector<double> pixels);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t channels() const noexcept { return channels_; }
  const std::vector<double>& pixels() const noexcept { return pixels_; }

  double at(std::size_t x, std::size_t y, std::size_t c) const noexcept {
    return pixels_[(y * width_ + x) * channels_ + c];
  }

  /// Copy of the rectangle [x0, x1) x [y0, y1).
  Image crop(std::size_t x0, std::size_t y0, std::size_t x1,
             std::size_t y1) const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> pixels_;
};

// Netpbm I/O. P2/P5 (gray) and P3/P6 (RGB) are accepted on read; samples are
// divided by maxval (1/255 for the usual 8-bit files). A file may hold several
// images back to back, which is how raw tactile frame sequences are stored.

std::vector<Image> decode_netpbm_stream(std::string_view bytes);
Image decode_netpbm(std::string_view bytes);

std::vector<Image> read_netpbm_sequence(const std::filesystem::path& path);
Image read_netpbm(const std::filesystem::path& path);

/// Binary P5 or P6 with maxval 255.
std::string encode_netpbm(const Image& image);
void write_netpbm(const std::filesystem::path& path, const Image& image);
/// Writes all frames into one multi-image file.
void write_netpbm_sequence(const std::filesystem::path& path,
                           const std::vector<Image>& frames);

std::string read_file_bytes(const std::filesystem::path& path);

}  // namespace vital
