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

// Toy vision and tactile towers. Both follow the same shape as the real
// system: hand-computed region/frame statistics stand in for a pretrained
// backbone, an encoder MLP produces the penultimate feature, and a projector
// maps it into the shared d-dimensional model space.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vital/image.hpp"
#include "vital/numerics.hpp"

namespace vital {

enum class Modality { kVision, kTactile, kText };

std::string_view to_string(Modality modality);

/// Ordered embeddings of a single modality, stored as a length x d matrix.
class EmbeddingSequence {
 public:
  EmbeddingSequence(Modality modality, std::size_t dim);
  /// Throws kInput when vectors contain NaN/Inf.
  EmbeddingSequence(Modality modality, Matrix vectors);

  Modality modality() const noexcept { return modality_; }
  std::size_t length() const noexcept { return vectors_.rows(); }
  std::size_t dim() const noexcept { return vectors_.cols(); }
  std::span<const double> operator[](std::size_t i) const {
    return vectors_.row(i);
  }
  const Matrix& vectors() const noexcept { return vectors_; }

  void append(std::span<const double> v);

  friend bool operator==(const EmbeddingSequence&,
                         const EmbeddingSequence&) = default;

 private:
  Modality modality_;
  Matrix vectors_;
};

/// Time-ordered tactile frames. Constructor enforces equal lengths and
/// strictly increasing timestamps.
class TactileClip {
 public:
  TactileClip() = default;
  TactileClip(std::vector<Image> frames, std::vector<std::int64_t> timestamps_ms,
              std::string sensor_id);

  /// Timestamps i * 1000 / fps (rounded to the nearest millisecond).
  static TactileClip from_fps(std::vector<Image> frames, double fps,
                              std::string sensor_id);

  const std::vector<Image>& frames() const noexcept { return frames_; }
  const std::vector<std::int64_t>& timestamps_ms() const noexcept {
    return timestamps_ms_;
  }
  const std::string& sensor_id() const noexcept { return sensor_id_; }
  std::size_t size() const noexcept { return frames_.size(); }
  bool empty() const noexcept { return frames_.empty(); }

 private:
  std::vector<Image> frames_;
  std::vector<std::int64_t> timestamps_ms_;
  std::string sensor_id_;
};

struct RegionBounds {
  std::size_t row_begin, row_end;  // [begin, end)
  std::size_t col_begin, col_end;
};

struct RegionGrid {
  std::size_t grid_size = 0;
  std::vector<RegionBounds> bounds;  // row-major, grid_size^2 entries
  std::vector<Image> regions;        // same order as bounds
};

/// Splits the image into G x G tiles. Tile (r, c) spans rows
/// [r * (H / G), (r + 1) * (H / G)), the last row/column absorbing the
/// remainder; columns likewise. Throws kConfig if G == 0 or G > min(W, H).
RegionGrid segment_image(const Image& image, std::size_t grid);

/// Per channel: mean, standard deviation and an 8-bin normalised intensity
/// histogram. Gray inputs are replicated to three channels so every image
/// yields kFeatureDim values.
inline constexpr std::size_t kHistogramBins = 8;
inline constexpr std::size_t kFeatureDim = 3 * (2 + kHistogramBins);
Vector region_features(const Image& image);

/// Encoder (features -> penultimate) followed by projector (-> shared d).
struct EncoderTower {
  MlpParams encoder;
  MlpParams projector;

  std::size_t dim() const { return projector.out_dim(); }
};

inline constexpr std::size_t kDefaultGrid = 4;
inline constexpr std::size_t kDefaultDim = 64;

/// Seeded tower: kFeatureDim -> hidden (relu) -> penultimate, then a single
/// linear projection penultimate -> dim.
EncoderTower make_encoder_tower(Rng& rng, std::size_t dim,
                                std::size_t hidden = 64,
                                std::size_t penultimate = 64);

/// G^2 embeddings in row-major region order.
EmbeddingSequence encode_vision(const Image& image, std::size_t grid,
                                const MlpParams& encoder,
                                const MlpParams& projector);

struct TactileEncodeOptions {
  /// Test hook: disabling positional encodings makes frame order invisible.
  bool add_positional = true;
};

/// One embedding per frame: projector(encoder(features)) + PE row t.
/// Throws kInput for an empty clip and kConfig when d is odd.
EmbeddingSequence encode_tactile(const TactileClip& clip,
                                 const MlpParams& encoder,
                                 const MlpParams& projector,
                                 TactileEncodeOptions options = {});

enum class BoundaryToken { kImgStart, kImgEnd, kTactStart, kTactEnd };

inline constexpr std::array<BoundaryToken, 4> kAllBoundaryTokens = {
    BoundaryToken::kImgStart, BoundaryToken::kImgEnd, BoundaryToken::kTactStart,
    BoundaryToken::kTactEnd};

/// "img_start", "img_end", "tact_start", "tact_end".
std::string_view to_string(BoundaryToken token);

/// Frozen span delimiters. There are no mutators: once built by
/// init_boundary_tokens the vectors cannot change.
class BoundaryTokens {
 public:
  std::span<const double> get(BoundaryToken token) const {
    return vectors_[static_cast<std::size_t>(token)];
  }
  std::size_t dim() const noexcept { return vectors_[0].size(); }
  constexpr bool frozen() const noexcept { return true; }

 private:
  friend BoundaryTokens init_boundary_tokens(
      const std::map<std::string, std::vector<Vector>>& phrase_embeddings);
  BoundaryTokens() = default;

  std::array<Vector, 4> vectors_;
};

/// Each token is the arithmetic mean of its phrase embeddings. Keys are the
/// token names above; a missing name or an empty list is kConfig, mixed
/// dimensions kShape.
BoundaryTokens init_boundary_tokens(
    const std::map<std::string, std::vector<Vector>>& phrase_embeddings);

}  // namespace vital
