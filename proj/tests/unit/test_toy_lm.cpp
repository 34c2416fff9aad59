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
#include <numeric>

#include "support/fixtures.hpp"
#include "vital/pipeline.hpp"
#include "vital/toy_lm.hpp"

namespace vital {
namespace {

using testing::throws_kind;

MultimodalSequence demo_sequence(const ModelSpace& space, std::uint64_t image_seed) {
  const Image image = testing::pattern_image(16, 16, 3, image_seed);
  std::vector<Image> frames;
  for (std::uint64_t s = 0; s < 3; ++s) frames.push_back(testing::pattern_image(8, 8, 1, 50 + s));
  const auto clip = TactileClip::from_fps(frames, 20.0, "s");
  const auto vision = encode_vision(image, 2, space.vision.encoder, space.vision.projector);
  const auto tactile = encode_tactile(clip, space.tactile.encoder, space.tactile.projector);
  const std::vector<EmbeddingSequence> text = {
      embed_tokens(tokenize_text("Rate the object."), space.lm.embedding),
      embed_tokens(tokenize_text("Answer now."), space.lm.embedding)};
  return assemble_sequence(text, vision, tactile, space.markers, default_layout());
}

GenerationRequest request_for(MultimodalSequence seq, double temperature = 0.0) {
  GenerationRequest r;
  r.sequence = std::move(seq);
  r.temperature = temperature;
  return r;
}

TEST(ToyLmWeights, ShapesAndSeeding) {
  const auto w = make_toy_lm_weights(3, 16);
  EXPECT_EQ(w.embedding.rows(), kVocabSize);
  EXPECT_EQ(w.embedding.cols(), 16u);
  EXPECT_EQ(w.head.rows(), kVocabSize);
  ASSERT_EQ(w.layers.size(), 2u);
  EXPECT_EQ(w.layers[0].wq.rows(), 16u);
  EXPECT_EQ(w.layers[0].ffn.in_dim(), 16u);
  EXPECT_EQ(w.layers[0].ffn.out_dim(), 16u);
  EXPECT_EQ(make_toy_lm_weights(3, 16).embedding, w.embedding);
  EXPECT_NE(make_toy_lm_weights(4, 16).embedding, w.embedding);
}

TEST(GreedyPick, TiesGoToLowestId) {
  const Vector logits = {0.5, 2.0, 2.0, 1.0};
  const std::vector<TokenId> all = {0, 1, 2, 3};
  EXPECT_EQ(greedy_pick(logits, all), 1u);
  const std::vector<TokenId> subset = {0, 3};
  EXPECT_EQ(greedy_pick(logits, subset), 3u);
  EXPECT_TRUE(throws_kind(ErrorKind::kInput, [&] { (void)greedy_pick(logits, {}); }));
}

TEST(ToyLm, ConstrainedOutputAlwaysParsesStrictly) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ModelSpace space = make_model_space(seed, 16);
    const ToyLm lm(space.lm, seed);
    const auto result = lm.generate(request_for(demo_sequence(space, seed)));
    EXPECT_EQ(result.finish_reason, FinishReason::kStop);
    const auto parsed = parse_response(result.text, ParseMode::kStrict);
    EXPECT_TRUE(parsed.warnings.empty()) << result.text;
    for (auto p : kAllProperties) {
      EXPECT_GE(parsed.scores.score(p), 1);
      EXPECT_LE(parsed.scores.score(p), 10);
    }
  }
}

TEST(ToyLm, GreedyAndSeededSamplingAreDeterministic) {
  const ModelSpace space = make_model_space(9, 16);
  const ToyLm lm(space.lm, 9);
  const auto seq = demo_sequence(space, 1);
  EXPECT_EQ(lm.generate(request_for(seq)).text, lm.generate(request_for(seq)).text);
  EXPECT_EQ(lm.generate(request_for(seq, 0.8)).text, lm.generate(request_for(seq, 0.8)).text);
}

TEST(ToyLm, InspectExposesCausalAttentionOverThePrompt) {
  const ModelSpace space = make_model_space(5, 16);
  const ToyLm lm(space.lm, 5);
  const auto seq = demo_sequence(space, 2);
  const auto trace = lm.inspect(seq);
  EXPECT_EQ(trace.logits.size(), kVocabSize);
  ASSERT_EQ(trace.attention.size(), 2u);
  for (const auto& row : trace.attention) {
    ASSERT_EQ(row.size(), seq.length());
    EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-12);
    for (double w : row) EXPECT_GE(w, 0.0);
  }
  // The vision span feeds the final position.
  const auto other = lm.inspect(demo_sequence(space, 77));
  double diff = 0.0;
  for (std::size_t i = 0; i < kVocabSize; ++i) diff += std::abs(other.logits[i] - trace.logits[i]);
  EXPECT_GT(diff, 0.0);
}

TEST(ToyLm, UnconstrainedModeRespectsTokenBudget) {
  const ModelSpace space = make_model_space(5, 16);
  const ToyLm lm(space.lm, 5, ToyLm::Options{false});
  auto req = request_for(demo_sequence(space, 3));
  req.max_tokens = 12;
  const auto result = lm.generate(req);
  EXPECT_LE(result.text.size(), 12u);
  EXPECT_FALSE(result.text.empty());
}

TEST(ToyLm, RejectsMismatchedRequests) {
  const ModelSpace space = make_model_space(5, 16);
  const ToyLm lm(make_toy_lm_weights(5, 8), 5);
  EXPECT_TRUE(throws_kind(ErrorKind::kShape,
                          [&] { (void)lm.generate(request_for(demo_sequence(space, 3))); }));
  GenerationRequest empty;
  EXPECT_TRUE(throws_kind(ErrorKind::kConfig, [&] { (void)lm.generate(empty); }));
}

}  // namespace
}  // namespace vital
