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

#include "vital/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "vital/error.hpp"

namespace vital {

Image::Image(std::size_t width, std::size_t height, std::size_t channels,
             std::vector<double> pixels)
    : width_(width), height_(height), channels_(channels),
      pixels_(std::move(pixels)) {
  if (channels_ != 1 && channels_ != 3) {
    fail(ErrorKind::kInput, "image must have 1 or 3 channels, got " +
                                std::to_string(channels_));
  }
  if (pixels_.size() != width_ * height_ * channels_) {
    fail(ErrorKind::kShape, "image " + std::to_string(width_) + "x" +
                                std::to_string(height_) + "x" +
                                std::to_string(channels_) + " given " +
                                std::to_string(pixels_.size()) + " samples");
  }
  for (double& v : pixels_) v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
}

Image Image::crop(std::size_t x0, std::size_t y0, std::size_t x1,
                  std::size_t y1) const {
  if (x0 >= x1 || y0 >= y1 || x1 > width_ || y1 > height_) {
    fail(ErrorKind::kRange, "crop rectangle outside image");
  }
  std::vector<double> out;
  out.reserve((x1 - x0) * (y1 - y0) * channels_);
  for (std::size_t y = y0; y < y1; ++y) {
    const auto* begin = pixels_.data() + (y * width_ + x0) * channels_;
    out.insert(out.end(), begin, begin + (x1 - x0) * channels_);
  }
  return Image(x1 - x0, y1 - y0, channels_, std::move(out));
}

namespace {

class NetpbmReader {
 public:
  explicit NetpbmReader(std::string_view bytes) : bytes_(bytes) {}

  bool at_end() {
    skip_space_and_comments();
    return pos_ >= bytes_.size();
  }

  Image next() {
    skip_space_and_comments();
    if (pos_ + 2 > bytes_.size() || bytes_[pos_] != 'P') {
      fail(ErrorKind::kInput, "not a netpbm image (missing P magic)");
    }
    const char kind = bytes_[pos_ + 1];
    pos_ += 2;
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
      fail(ErrorKind::kInput, std::string("unsupported netpbm variant P") + kind);
    }
    const std::size_t width = read_number();
    const std::size_t height = read_number();
    const std::size_t maxval = read_number();
    if (width == 0 || height == 0) fail(ErrorKind::kInput, "empty netpbm image");
    if (maxval == 0 || maxval > 255) {
      fail(ErrorKind::kInput, "netpbm maxval must be in 1..255, got " +
                                  std::to_string(maxval));
    }
    const std::size_t channels = (kind == '3' || kind == '6') ? 3 : 1;
    const std::size_t count = width * height * channels;
    std::vector<double> pixels(count);
    const double scale = 1.0 / static_cast<double>(maxval);
    if (kind == '5' || kind == '6') {
      // Exactly one whitespace byte separates the header from the raster.
      if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
        fail(ErrorKind::kInput, "malformed netpbm header");
      }
      ++pos_;
      if (pos_ + count > bytes_.size()) fail(ErrorKind::kInput, "truncated netpbm raster");
      for (std::size_t i = 0; i < count; ++i) {
        pixels[i] = static_cast<unsigned char>(bytes_[pos_ + i]) * scale;
      }
      pos_ += count;
    } else {
      for (std::size_t i = 0; i < count; ++i) {
        pixels[i] = static_cast<double>(read_number()) * scale;
      }
    }
    return Image(width, height, channels, std::move(pixels));
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto ch = static_cast<unsigned char>(bytes_[pos_]);
      if (std::isspace(ch)) {
        ++pos_;
      } else if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t read_number() {
    skip_space_and_comments();
    std::size_t value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() &&
           std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      ++pos_;
      if (++digits > 9) fail(ErrorKind::kInput, "netpbm number too large");
    }
    if (digits == 0) fail(ErrorKind::kInput, "malformed netpbm header");
    return value;
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Image> decode_netpbm_stream(std::string_view bytes) {
  NetpbmReader reader(bytes);
  std::vector<Image> images;
  while (!reader.at_end()) images.push_back(reader.next());
  if (images.empty()) fail(ErrorKind::kInput, "no netpbm images in stream");
  return images;
}

Image decode_netpbm(std::string_view bytes) {
  NetpbmReader reader(bytes);
  return reader.next();
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::vector<Image> read_netpbm_sequence(const std::filesystem::path& path) {
  return decode_netpbm_stream(read_file_bytes(path));
}

Image read_netpbm(const std::filesystem::path& path) {
  return decode_netpbm(read_file_bytes(path));
}

std::string encode_netpbm(const Image& image) {
  std::ostringstream header;
  header << (image.channels() == 3 ? "P6" : "P5") << '\n'
         << image.width() << ' ' << image.height() << "\n255\n";
  std::string out = header.str();
  out.reserve(out.size() + image.pixels().size());
  for (double v : image.pixels()) {
    out.push_back(static_cast<char>(
        static_cast<unsigned char>(std::lround(v * 255.0))));
  }
  return out;
}

namespace {
void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}
}  // namespace

void write_netpbm(const std::filesystem::path& path, const Image& image) {
  write_bytes(path, encode_netpbm(image));
}

void write_netpbm_sequence(const std::filesystem::path& path,
                           const std::vector<Image>& frames) {
  std::string bytes;
  for (const auto& frame : frames) bytes += encode_netpbm(frame);
  write_bytes(path, bytes);
}

}  // namespace vital
