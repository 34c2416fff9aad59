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

// Byte-level tokenizer, token embedding lookup and assembly of the unified
// multimodal input sequence: text spans, the vision span bracketed by
// <img_start>/<img_end> and the tactile span bracketed by <tact_start>/<tact_end>.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vital/encoders.hpp"
#include "vital/numerics.hpp"

namespace vital {

using TokenId = std::uint32_t;

inline constexpr TokenId kByteVocab = 256;
inline constexpr TokenId kBosToken = 256;
inline constexpr TokenId kEosToken = 257;
inline constexpr TokenId kVocabSize = 258;

struct TokenSequence {
  std::vector<TokenId> ids;

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

/// One id per byte of s.
TokenSequence tokenize_text(std::string_view s);
/// Inverse of tokenize_text; special ids are dropped, ids >= kVocabSize throw kRange.
std::string detokenize(const TokenSequence& tokens);

/// Row lookup into a V x d table. Throws kRange for ids >= table.rows().
EmbeddingSequence embed_tokens(const TokenSequence& tokens, const Matrix& table);

enum class ItemTag { kText, kImgStart, kVision, kImgEnd, kTactStart, kTactile, kTactEnd };

std::string_view to_string(ItemTag tag);
bool is_marker(ItemTag tag);

/// True iff tags contain exactly one img_start vision* img_end run and exactly
/// one tact_start tactile* tact_end run, with no stray vision/tactile items.
bool has_valid_spans(std::span<const ItemTag> tags);

/// The model-ready input: one embedding per item plus its tag.
class MultimodalSequence {
 public:
  /// Throws kShape when lengths differ and kInput when the span structure is
  /// invalid (see has_valid_spans).
  MultimodalSequence(Matrix embeddings, std::vector<ItemTag> tags);

  std::size_t length() const noexcept { return tags_.size(); }
  std::size_t dim() const noexcept { return embeddings_.cols(); }
  const Matrix& embeddings() const noexcept { return embeddings_; }
  const std::vector<ItemTag>& tags() const noexcept { return tags_; }
  std::span<const double> operator[](std::size_t i) const {
    return embeddings_.row(i);
  }

  /// Index range [first, last) of the items tagged tag (vision or tactile).
  std::pair<std::size_t, std::size_t> span_of(ItemTag tag) const;

  friend bool operator==(const MultimodalSequence&,
                         const MultimodalSequence&) = default;

 private:
  Matrix embeddings_;
  std::vector<ItemTag> tags_;
};

enum class SegmentKind { kText, kVision, kTactile };

struct LayoutSegment {
  SegmentKind kind = SegmentKind::kText;
  std::size_t text_part = 0;  // only meaningful for kText

  friend bool operator==(const LayoutSegment&, const LayoutSegment&) = default;
};

using Layout = std::vector<LayoutSegment>;

/// [text:0, vision, tactile, text:1]: instructions, then the two sensory
/// spans, then the user request.
Layout default_layout();
/// [vision, tactile, text:0]: sensory spans strictly before all text.
Layout prepend_layout();

/// Descriptors are "vision", "tactile" or "text:<k>". Throws kConfig.
Layout parse_layout(std::span<const std::string> descriptors);
std::vector<std::string> layout_descriptors(const Layout& layout);

/// Lays out text parts and the two marker-bracketed spans in layout order.
/// Every text part, the vision span and the tactile span must be referenced
/// exactly once (kConfig otherwise); all dims must equal markers.dim() (kShape).
MultimodalSequence assemble_sequence(std::span<const EmbeddingSequence> text_parts,
                                     const EmbeddingSequence& vision,
                                     const EmbeddingSequence& tactile,
                                     const BoundaryTokens& markers,
                                     const Layout& layout);

}  // namespace vital
