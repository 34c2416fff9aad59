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

#include "vital/encoders.hpp"

#include <algorithm>
#include <cmath>

#include "vital/error.hpp"

namespace vital {

std::string_view to_string(Modality modality) {
  switch (modality) {
    case Modality::kVision: return "vision";
    case Modality::kTactile: return "tactile";
    case Modality::kText: return "text";
  }
  return "unknown";
}

std::string_view to_string(BoundaryToken token) {
  switch (token) {
    case BoundaryToken::kImgStart: return "img_start";
    case BoundaryToken::kImgEnd: return "img_end";
    case BoundaryToken::kTactStart: return "tact_start";
    case BoundaryToken::kTactEnd: return "tact_end";
  }
  return "unknown";
}

EmbeddingSequence::EmbeddingSequence(Modality modality, std::size_t dim)
    : modality_(modality), vectors_(0, dim) {}

EmbeddingSequence::EmbeddingSequence(Modality modality, Matrix vectors)
    : modality_(modality), vectors_(std::move(vectors)) {
  if (!vectors_.all_finite()) {
    fail(ErrorKind::kInput, "embedding sequence contains NaN or Inf");
  }
}

void EmbeddingSequence::append(std::span<const double> v) {
  if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) {
    fail(ErrorKind::kInput, "embedding contains NaN or Inf");
  }
  vectors_.append_row(v);
}

// ---------------------------------------------------------------------------

TactileClip::TactileClip(std::vector<Image> frames,
                         std::vector<std::int64_t> timestamps_ms,
                         std::string sensor_id)
    : frames_(std::move(frames)),
      timestamps_ms_(std::move(timestamps_ms)),
      sensor_id_(std::move(sensor_id)) {
  if (frames_.size() != timestamps_ms_.size()) {
    fail(ErrorKind::kInput, "tactile clip has " + std::to_string(frames_.size()) +
                                " frames but " +
                                std::to_string(timestamps_ms_.size()) +
                                " timestamps");
  }
  for (std::size_t i = 1; i < timestamps_ms_.size(); ++i) {
    if (timestamps_ms_[i] <= timestamps_ms_[i - 1]) {
      fail(ErrorKind::kInput, "tactile timestamps must be strictly increasing (frame " +
                                  std::to_string(i) + ")");
    }
  }
}

TactileClip TactileClip::from_fps(std::vector<Image> frames, double fps,
                                  std::string sensor_id) {
  if (!(fps > 0.0)) fail(ErrorKind::kConfig, "fps must be > 0");
  std::vector<std::int64_t> ts(frames.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    ts[i] = std::llround(static_cast<double>(i) * 1000.0 / fps);
  }
  return TactileClip(std::move(frames), std::move(ts), std::move(sensor_id));
}

// ---------------------------------------------------------------------------

RegionGrid segment_image(const Image& image, std::size_t grid) {
  const std::size_t w = image.width();
  const std::size_t h = image.height();
  if (grid == 0 || grid > std::min(w, h)) {
    fail(ErrorKind::kConfig, "grid size " + std::to_string(grid) +
                                 " invalid for " + std::to_string(w) + "x" +
                                 std::to_string(h) + " image");
  }
  const std::size_t tile_h = h / grid;
  const std::size_t tile_w = w / grid;
  RegionGrid out;
  out.grid_size = grid;
  for (std::size_t r = 0; r < grid; ++r) {
    for (std::size_t c = 0; c < grid; ++c) {
      RegionBounds b;
      b.row_begin = r * tile_h;
      b.row_end = (r + 1 == grid) ? h : (r + 1) * tile_h;
      b.col_begin = c * tile_w;
      b.col_end = (c + 1 == grid) ? w : (c + 1) * tile_w;
      out.regions.push_back(
          image.crop(b.col_begin, b.row_begin, b.col_end, b.row_end));
      out.bounds.push_back(b);
    }
  }
  return out;
}

Vector region_features(const Image& image) {
  const std::size_t n = image.width() * image.height();
  if (n == 0) fail(ErrorKind::kInput, "features of an empty image");
  Vector out;
  out.reserve(kFeatureDim);
  for (std::size_t c = 0; c < 3; ++c) {
    const std::size_t src = image.channels() == 1 ? 0 : c;
    double sum = 0.0;
    std::array<double, kHistogramBins> hist{};
    for (std::size_t i = 0; i < n; ++i) {
      const double v = image.pixels()[i * image.channels() + src];
      sum += v;
      const auto bin = std::min<std::size_t>(
          static_cast<std::size_t>(v * kHistogramBins), kHistogramBins - 1);
      hist[bin] += 1.0;
    }
    const double mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = image.pixels()[i * image.channels() + src] - mean;
      var += d * d;
    }
    out.push_back(mean);
    out.push_back(std::sqrt(var / static_cast<double>(n)));
    for (double count : hist) out.push_back(count / static_cast<double>(n));
  }
  return out;
}

EncoderTower make_encoder_tower(Rng& rng, std::size_t dim, std::size_t hidden,
                                std::size_t penultimate) {
  const std::array<std::size_t, 3> enc_dims = {kFeatureDim, hidden, penultimate};
  const std::array<std::size_t, 2> proj_dims = {penultimate, dim};
  EncoderTower tower;
  tower.encoder = random_mlp(rng, enc_dims);
  tower.projector = random_mlp(rng, proj_dims);
  return tower;
}

namespace {

Vector project(const Image& image, const MlpParams& encoder,
               const MlpParams& projector) {
  if (encoder.out_dim() != projector.in_dim()) {
    fail(ErrorKind::kShape, "encoder output " + std::to_string(encoder.out_dim()) +
                                " does not match projector input " +
                                std::to_string(projector.in_dim()));
  }
  return mlp_forward(projector, mlp_forward(encoder, region_features(image)));
}

}  // namespace

EmbeddingSequence encode_vision(const Image& image, std::size_t grid,
                                const MlpParams& encoder,
                                const MlpParams& projector) {
  const RegionGrid regions = segment_image(image, grid);
  EmbeddingSequence out(Modality::kVision, projector.out_dim());
  for (const auto& region : regions.regions) {
    out.append(project(region, encoder, projector));
  }
  return out;
}

EmbeddingSequence encode_tactile(const TactileClip& clip,
                                 const MlpParams& encoder,
                                 const MlpParams& projector,
                                 TactileEncodeOptions options) {
  if (clip.empty()) fail(ErrorKind::kInput, "empty tactile clip");
  const std::size_t dim = projector.out_dim();
  Matrix pe;
  if (options.add_positional) pe = sinusoidal_pe(clip.size(), dim);
  EmbeddingSequence out(Modality::kTactile, dim);
  for (std::size_t t = 0; t < clip.size(); ++t) {
    Vector v = project(clip.frames()[t], encoder, projector);
    if (options.add_positional) {
      const auto row = pe.row(t);
      for (std::size_t i = 0; i < dim; ++i) v[i] += row[i];
    }
    out.append(v);
  }
  return out;
}

BoundaryTokens init_boundary_tokens(
    const std::map<std::string, std::vector<Vector>>& phrase_embeddings) {
  BoundaryTokens tokens;
  std::size_t dim = 0;
  for (BoundaryToken token : kAllBoundaryTokens) {
    const std::string name(to_string(token));
    const auto it = phrase_embeddings.find(name);
    if (it == phrase_embeddings.end() || it->second.empty()) {
      fail(ErrorKind::kConfig, "boundary token '" + name +
                                   "' needs at least one phrase embedding");
    }
    if (dim == 0) dim = it->second.front().size();
    if (dim == 0) fail(ErrorKind::kShape, "phrase embeddings must be non-empty");
    Vector mean(dim, 0.0);
    for (const auto& e : it->second) {
      if (e.size() != dim) {
        fail(ErrorKind::kShape, "boundary token '" + name + "' mixes dims " +
                                    std::to_string(dim) + " and " +
                                    std::to_string(e.size()));
      }
      for (std::size_t i = 0; i < dim; ++i) mean[i] += e[i];
    }
    for (double& v : mean) {
      v /= static_cast<double>(it->second.size());
      if (!std::isfinite(v)) fail(ErrorKind::kInput, "non-finite phrase embedding");
    }
    tokens.vectors_[static_cast<std::size_t>(token)] = std::move(mean);
  }
  for (const auto& [name, _] : phrase_embeddings) {
    bool known = false;
    for (BoundaryToken token : kAllBoundaryTokens) known |= (name == to_string(token));
    if (!known) fail(ErrorKind::kConfig, "unknown boundary token '" + name + "'");
  }
  return tokens;
}

}  // namespace vital
