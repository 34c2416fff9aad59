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

#include <gtest/gtest.h>

#include <cmath>

#include "support/fixtures.hpp"
#include "vital/encoders.hpp"

namespace vital {
namespace {

using testing::throws_kind;

// Straight-line feature oracle: mean, population std and 8-bin histogram per
// RGB channel, grayscale replicated.
Vector oracle_features(const Image& img) {
  Vector out;
  const std::size_t n = img.width() * img.height();
  for (std::size_t c = 0; c < 3; ++c) {
    const std::size_t src = img.channels() == 1 ? 0 : c;
    double sum = 0, sq = 0;
    double hist[8] = {};
    for (std::size_t y = 0; y < img.height(); ++y) {
      for (std::size_t x = 0; x < img.width(); ++x) {
        const double v = img.at(x, y, src);
        sum += v;
        int b = static_cast<int>(std::floor(v * 8.0));
        if (b > 7) b = 7;
        hist[b] += 1;
      }
    }
    const double mean = sum / n;
    for (std::size_t y = 0; y < img.height(); ++y) {
      for (std::size_t x = 0; x < img.width(); ++x) sq += std::pow(img.at(x, y, src) - mean, 2);
    }
    out.push_back(mean);
    out.push_back(std::sqrt(sq / n));
    for (double h : hist) out.push_back(h / n);
  }
  return out;
}

Vector oracle_dense(const DenseLayer& l, const Vector& x) {
  Vector y(l.weight.rows());
  for (std::size_t i = 0; i < y.size(); ++i) {
    double acc = l.bias[i];
    for (std::size_t k = 0; k < x.size(); ++k) acc += l.weight(i, k) * x[k];
    y[i] = l.activation == Activation::kRelu ? std::max(acc, 0.0) : acc;
  }
  return y;
}

Vector oracle_tower(const EncoderTower& t, const Image& region) {
  Vector h = oracle_features(region);
  for (const auto& l : t.encoder.layers()) h = oracle_dense(l, h);
  for (const auto& l : t.projector.layers()) h = oracle_dense(l, h);
  return h;
}

TEST(Segment, TilesCoverImageWithRemainderInLastTile) {
  const Image img = testing::pattern_image(10, 7, 1, 3);
  const RegionGrid g = segment_image(img, 3);
  ASSERT_EQ(g.bounds.size(), 9u);
  EXPECT_EQ(g.bounds[0].row_end, 2u);
  EXPECT_EQ(g.bounds[0].col_end, 3u);
  EXPECT_EQ(g.bounds[8].row_begin, 4u);
  EXPECT_EQ(g.bounds[8].row_end, 7u);
  EXPECT_EQ(g.bounds[8].col_end, 10u);
  std::size_t area = 0;
  for (const auto& r : g.regions) area += r.width() * r.height();
  EXPECT_EQ(area, 70u);
  EXPECT_TRUE(throws_kind(ErrorKind::kConfig, [&] { (void)segment_image(img, 0); }));
  EXPECT_TRUE(throws_kind(ErrorKind::kConfig, [&] { (void)segment_image(img, 8); }));
}

TEST(Features, ConstantImage) {
  const Image img(4, 4, 1, std::vector<double>(16, 0.5));
  const Vector f = region_features(img);
  ASSERT_EQ(f.size(), kFeatureDim);
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_DOUBLE_EQ(f[c * 10 + 0], 0.5);
    EXPECT_DOUBLE_EQ(f[c * 10 + 1], 0.0);
    EXPECT_DOUBLE_EQ(f[c * 10 + 2 + 4], 1.0);
  }
  const Image ones(2, 2, 3, std::vector<double>(12, 1.0));
  EXPECT_DOUBLE_EQ(region_features(ones)[2 + 7], 1.0);
}

TEST(Features, MatchOracleOnTexturedImages) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Image img = testing::pattern_image(9, 6, s % 2 ? 3 : 1, s);
    const Vector got = region_features(img);
    const Vector want = oracle_features(img);
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
  }
}

TEST(VisionEncoder, MatchesStraightLineOracle) {
  Rng rng(21);
  const EncoderTower tower = make_encoder_tower(rng, 16, 12, 10);
  const Image img = testing::pattern_image(24, 20, 3, 8);
  const EmbeddingSequence seq = encode_vision(img, 4, tower.encoder, tower.projector);
  ASSERT_EQ(seq.length(), 16u);
  ASSERT_EQ(seq.dim(), 16u);
  const RegionGrid g = segment_image(img, 4);
  for (std::size_t r = 0; r < 16; ++r) {
    const Vector want = oracle_tower(tower, g.regions[r]);
    for (std::size_t k = 0; k < 16; ++k) EXPECT_NEAR(seq[r][k], want[k], 1e-12);
  }
}

TEST(TactileEncoder, AddsPositionalRowPerFrame) {
  Rng rng(4);
  const EncoderTower tower = make_encoder_tower(rng, 8, 6, 6);
  std::vector<Image> frames(3, testing::pattern_image(8, 8, 1, 1));
  const TactileClip clip = TactileClip::from_fps(frames, 20.0, "s");
  const auto with_pe = encode_tactile(clip, tower.encoder, tower.projector);
  const auto without = encode_tactile(clip, tower.encoder, tower.projector, {false});
  const Matrix pe = sinusoidal_pe(3, 8);
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t k = 0; k < 8; ++k) {
      EXPECT_NEAR(with_pe[t][k] - without[t][k], pe(t, k), 1e-12);
    }
  }
  // Identical frames only differ by position.
  EXPECT_EQ(without[0][0], without[2][0]);
  EXPECT_NE(with_pe[0][0], with_pe[2][0]);
  EXPECT_TRUE(throws_kind(ErrorKind::kInput,
                          [&] { (void)encode_tactile(TactileClip(), tower.encoder, tower.projector); }));
}

TEST(TactileClip, ValidatesTimestamps) {
  std::vector<Image> two(2, testing::pattern_image(2, 2, 1, 0));
  EXPECT_TRUE(throws_kind(ErrorKind::kInput, [&] { TactileClip(two, {0, 0}, "s"); }));
  EXPECT_TRUE(throws_kind(ErrorKind::kInput, [&] { TactileClip(two, {0}, "s"); }));
  const auto clip = TactileClip::from_fps(std::vector<Image>(4, two[0]), 30.0, "s");
  EXPECT_EQ(clip.timestamps_ms(), (std::vector<std::int64_t>{0, 33, 67, 100}));
}

TEST(BoundaryTokens, MeanOfPhrasesAndFrozen) {
  std::map<std::string, std::vector<Vector>> phrases = {
      {"img_start", {{1, 2}, {3, 4}}},
      {"img_end", {{0, 0}}},
      {"tact_start", {{2, 2}, {4, 4}, {6, 6}}},
      {"tact_end", {{-1, 1}}},
  };
  const BoundaryTokens t = init_boundary_tokens(phrases);
  EXPECT_EQ(t.dim(), 2u);
  EXPECT_DOUBLE_EQ(t.get(BoundaryToken::kImgStart)[0], 2.0);
  EXPECT_DOUBLE_EQ(t.get(BoundaryToken::kImgStart)[1], 3.0);
  EXPECT_DOUBLE_EQ(t.get(BoundaryToken::kTactStart)[1], 4.0);
  EXPECT_TRUE(t.frozen());

  auto missing = phrases;
  missing.erase("tact_end");
  EXPECT_TRUE(throws_kind(ErrorKind::kConfig, [&] { (void)init_boundary_tokens(missing); }));
  auto empty = phrases;
  empty["img_end"].clear();
  EXPECT_TRUE(throws_kind(ErrorKind::kConfig, [&] { (void)init_boundary_tokens(empty); }));
  auto mixed = phrases;
  mixed["img_end"] = {{1, 2, 3}};
  EXPECT_TRUE(throws_kind(ErrorKind::kShape, [&] { (void)init_boundary_tokens(mixed); }));
  auto unknown = phrases;
  unknown["video_start"] = {{1, 1}};
  EXPECT_TRUE(throws_kind(ErrorKind::kConfig, [&] { (void)init_boundary_tokens(unknown); }));
}

TEST(EmbeddingSequence, RejectsNonFiniteAndWrongWidth) {
  EmbeddingSequence seq(Modality::kText, 2);
  const Vector ok = {1, 2};
  const Vector bad = {1, std::nan("")};
  const Vector wide = {1, 2, 3};
  seq.append(ok);
  EXPECT_TRUE(throws_kind(ErrorKind::kInput, [&] { seq.append(bad); }));
  EXPECT_TRUE(throws_kind(ErrorKind::kShape, [&] { seq.append(wide); }));
  EXPECT_EQ(seq.length(), 1u);
}

}  // namespace
}  // namespace vital
