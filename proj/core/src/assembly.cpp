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

#include "vital/assembly.hpp"

#include <charconv>

#include "vital/error.hpp"

namespace vital {

TokenSequence tokenize_text(std::string_view s) {
  TokenSequence out;
  out.ids.reserve(s.size());
  for (unsigned char ch : s) out.ids.push_back(ch);
  return out;
}

std::string detokenize(const TokenSequence& tokens) {
  std::string out;
  out.reserve(tokens.ids.size());
  for (TokenId id : tokens.ids) {
    if (id >= kVocabSize) {
      fail(ErrorKind::kRange, "token id " + std::to_string(id) +
                                  " outside vocabulary of " +
                                  std::to_string(kVocabSize));
    }
    if (id < kByteVocab) out.push_back(static_cast<char>(id));
  }
  return out;
}

EmbeddingSequence embed_tokens(const TokenSequence& tokens, const Matrix& table) {
  EmbeddingSequence out(Modality::kText, table.cols());
  for (TokenId id : tokens.ids) {
    if (id >= table.rows()) {
      fail(ErrorKind::kRange, "token id " + std::to_string(id) +
                                  " >= embedding table rows " +
                                  std::to_string(table.rows()));
    }
    out.append(table.row(id));
  }
  return out;
}

std::string_view to_string(ItemTag tag) {
  switch (tag) {
    case ItemTag::kText: return "text";
    case ItemTag::kImgStart: return "img_start";
    case ItemTag::kVision: return "vision";
    case ItemTag::kImgEnd: return "img_end";
    case ItemTag::kTactStart: return "tact_start";
    case ItemTag::kTactile: return "tactile";
    case ItemTag::kTactEnd: return "tact_end";
  }
  return "unknown";
}

bool is_marker(ItemTag tag) {
  return tag == ItemTag::kImgStart || tag == ItemTag::kImgEnd ||
         tag == ItemTag::kTactStart || tag == ItemTag::kTactEnd;
}

namespace {

// Exactly one open ... body* ... close run; body items nowhere else.
bool single_span(std::span<const ItemTag> tags, ItemTag open, ItemTag body,
                 ItemTag close) {
  std::size_t opens = 0;
  bool inside = false;
  for (ItemTag t : tags) {
    if (t == open) {
      if (inside || ++opens > 1) return false;
      inside = true;
    } else if (t == close) {
      if (!inside) return false;
      inside = false;
    } else if (t == body) {
      if (!inside) return false;
    } else if (inside) {
      return false;
    }
  }
  return opens == 1 && !inside;
}

}  // namespace

bool has_valid_spans(std::span<const ItemTag> tags) {
  return single_span(tags, ItemTag::kImgStart, ItemTag::kVision, ItemTag::kImgEnd) &&
         single_span(tags, ItemTag::kTactStart, ItemTag::kTactile, ItemTag::kTactEnd);
}

MultimodalSequence::MultimodalSequence(Matrix embeddings, std::vector<ItemTag> tags)
    : embeddings_(std::move(embeddings)), tags_(std::move(tags)) {
  if (embeddings_.rows() != tags_.size()) {
    fail(ErrorKind::kShape, std::to_string(embeddings_.rows()) +
                                " embeddings for " + std::to_string(tags_.size()) +
                                " tags");
  }
  if (!has_valid_spans(tags_)) {
    fail(ErrorKind::kInput, "multimodal sequence span structure is invalid");
  }
}

std::pair<std::size_t, std::size_t> MultimodalSequence::span_of(ItemTag tag) const {
  const ItemTag open = tag == ItemTag::kVision ? ItemTag::kImgStart : ItemTag::kTactStart;
  for (std::size_t i = 0; i < tags_.size(); ++i) {
    if (tags_[i] == open) {
      std::size_t j = i + 1;
      while (j < tags_.size() && tags_[j] == tag) ++j;
      return {i + 1, j};
    }
  }
  return {0, 0};
}

Layout default_layout() {
  return {{SegmentKind::kText, 0},
          {SegmentKind::kVision, 0},
          {SegmentKind::kTactile, 0},
          {SegmentKind::kText, 1}};
}

Layout prepend_layout() {
  return {{SegmentKind::kVision, 0},
          {SegmentKind::kTactile, 0},
          {SegmentKind::kText, 0}};
}

Layout parse_layout(std::span<const std::string> descriptors) {
  Layout layout;
  for (const auto& d : descriptors) {
    if (d == "vision") {
      layout.push_back({SegmentKind::kVision, 0});
    } else if (d == "tactile") {
      layout.push_back({SegmentKind::kTactile, 0});
    } else if (d.rfind("text:", 0) == 0) {
      std::size_t part = 0;
      const char* first = d.data() + 5;
      const char* last = d.data() + d.size();
      const auto [ptr, ec] = std::from_chars(first, last, part);
      if (ec != std::errc() || ptr != last || first == last) {
        fail(ErrorKind::kConfig, "bad layout descriptor '" + d + "'");
      }
      layout.push_back({SegmentKind::kText, part});
    } else {
      fail(ErrorKind::kConfig, "unknown layout descriptor '" + d +
                                   "' (expected vision, tactile or text:<k>)");
    }
  }
  return layout;
}

std::vector<std::string> layout_descriptors(const Layout& layout) {
  std::vector<std::string> out;
  for (const auto& seg : layout) {
    switch (seg.kind) {
      case SegmentKind::kVision: out.emplace_back("vision"); break;
      case SegmentKind::kTactile: out.emplace_back("tactile"); break;
      case SegmentKind::kText: out.push_back("text:" + std::to_string(seg.text_part)); break;
    }
  }
  return out;
}

MultimodalSequence assemble_sequence(std::span<const EmbeddingSequence> text_parts,
                                     const EmbeddingSequence& vision,
                                     const EmbeddingSequence& tactile,
                                     const BoundaryTokens& markers,
                                     const Layout& layout) {
  std::vector<int> text_uses(text_parts.size(), 0);
  int vision_uses = 0;
  int tactile_uses = 0;
  for (const auto& seg : layout) {
    switch (seg.kind) {
      case SegmentKind::kVision: ++vision_uses; break;
      case SegmentKind::kTactile: ++tactile_uses; break;
      case SegmentKind::kText:
        if (seg.text_part >= text_parts.size()) {
          fail(ErrorKind::kConfig, "layout references text part " +
                                       std::to_string(seg.text_part) + " but only " +
                                       std::to_string(text_parts.size()) +
                                       " were supplied");
        }
        ++text_uses[seg.text_part];
        break;
    }
  }
  if (vision_uses != 1 || tactile_uses != 1) {
    fail(ErrorKind::kConfig, "layout must reference the vision and tactile spans "
                             "exactly once each");
  }
  for (std::size_t k = 0; k < text_uses.size(); ++k) {
    if (text_uses[k] != 1) {
      fail(ErrorKind::kConfig, "layout references text part " + std::to_string(k) +
                                   " " + std::to_string(text_uses[k]) +
                                   " times (expected once)");
    }
  }

  const std::size_t dim = markers.dim();
  auto check_dim = [dim](const EmbeddingSequence& s, std::string_view what) {
    if (s.dim() != dim) {
      fail(ErrorKind::kShape, std::string(what) + " dim " + std::to_string(s.dim()) +
                                  " != marker dim " + std::to_string(dim));
    }
  };
  check_dim(vision, "vision");
  check_dim(tactile, "tactile");
  for (const auto& part : text_parts) check_dim(part, "text");

  std::size_t total = vision.length() + tactile.length() + 4;
  for (const auto& part : text_parts) total += part.length();

  std::vector<double> data;
  data.reserve(total * dim);
  std::vector<ItemTag> tags;
  tags.reserve(total);
  auto push = [&](std::span<const double> v, ItemTag tag) {
    data.insert(data.end(), v.begin(), v.end());
    tags.push_back(tag);
  };
  auto push_all = [&](const EmbeddingSequence& s, ItemTag tag) {
    for (std::size_t i = 0; i < s.length(); ++i) push(s[i], tag);
  };

  for (const auto& seg : layout) {
    switch (seg.kind) {
      case SegmentKind::kText:
        push_all(text_parts[seg.text_part], ItemTag::kText);
        break;
      case SegmentKind::kVision:
        push(markers.get(BoundaryToken::kImgStart), ItemTag::kImgStart);
        push_all(vision, ItemTag::kVision);
        push(markers.get(BoundaryToken::kImgEnd), ItemTag::kImgEnd);
        break;
      case SegmentKind::kTactile:
        push(markers.get(BoundaryToken::kTactStart), ItemTag::kTactStart);
        push_all(tactile, ItemTag::kTactile);
        push(markers.get(BoundaryToken::kTactEnd), ItemTag::kTactEnd);
        break;
    }
  }
  Matrix embeddings(tags.size(), dim, std::move(data));
  return MultimodalSequence(std::move(embeddings), std::move(tags));
}

}  // namespace vital
