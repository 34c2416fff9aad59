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

// ToyLM: a two-layer decoder with single-head scaled dot-product attention
// over the assembled multimodal sequence and greedy byte decoding. It
// consumes embeddings directly, which is the contract a pretrained VLM would
// see after the projection layers.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vital/backend.hpp"
#include "vital/numerics.hpp"

namespace vital {

struct ToyLmLayer {
  Matrix wq, wk, wv, wo;  // d x d
  MlpParams ffn;          // d -> hidden (relu) -> d
};

struct ToyLmWeights {
  std::size_t dim = 0;
  Matrix embedding;  // kVocabSize x d, shared with the tokenizer
  std::vector<ToyLmLayer> layers;
  Matrix head;  // kVocabSize x d
};

ToyLmWeights make_toy_lm_weights(std::uint64_t seed, std::size_t dim,
                                 std::size_t layers = 2);

/// Index of the largest logit among allowed (ascending ids); ties go to the
/// lowest id. Throws kInput when allowed is empty.
TokenId greedy_pick(std::span<const double> logits, std::span<const TokenId> allowed);

/// Logits and attention rows of the final prompt position, before any token
/// is generated. attention[l][j] is layer l's weight on position j.
struct FirstStepTrace {
  Vector logits;
  std::vector<Vector> attention;
};

class ToyLm final : public LanguageModel {
 public:
  struct Options {
    /// Mask decoding to the five-line answer contract so the output always
    /// parses; scores are still chosen by the model's digit logits.
    bool constrain_to_contract = true;
  };

  ToyLm(ToyLmWeights weights, std::uint64_t seed);
  ToyLm(ToyLmWeights weights, std::uint64_t seed, Options options);

  std::string name() const override { return "toy"; }
  RequestKind input_kind() const override { return RequestKind::kEmbeddings; }
  /// Throws kShape when the sequence dim differs from the model dim.
  GenerationResult generate(const GenerationRequest& request) const override;

  /// Debug hook over the prompt forward pass.
  FirstStepTrace inspect(const MultimodalSequence& sequence) const;

  const ToyLmWeights& weights() const noexcept { return weights_; }
  const Matrix& embedding_table() const noexcept { return weights_.embedding; }
  std::size_t dim() const noexcept { return weights_.dim; }

 private:
  ToyLmWeights weights_;
  std::uint64_t seed_;
  Options options_;
};

}  // namespace vital
