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

#include "vital/toy_lm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "vital/error.hpp"

namespace vital {

ToyLmWeights make_toy_lm_weights(std::uint64_t seed, std::size_t dim,
                                 std::size_t layers) {
  if (dim == 0 || dim % 2 != 0) {
    fail(ErrorKind::kConfig, "ToyLM dim must be even and > 0");
  }
  Rng rng(derive_seed(seed, "toy_lm"));
  // Uniform(-s, s) has variance s^2 / 3; these scales keep unit variance.
  const double proj = std::sqrt(3.0 / static_cast<double>(dim));
  ToyLmWeights w;
  w.dim = dim;
  w.embedding = seeded_init(rng, kVocabSize, dim, std::sqrt(3.0));
  for (std::size_t l = 0; l < layers; ++l) {
    ToyLmLayer layer;
    layer.wq = seeded_init(rng, dim, dim, proj);
    layer.wk = seeded_init(rng, dim, dim, proj);
    layer.wv = seeded_init(rng, dim, dim, proj);
    layer.wo = seeded_init(rng, dim, dim, proj);
    const std::array<std::size_t, 3> ffn_dims = {dim, 2 * dim, dim};
    layer.ffn = random_mlp(rng, ffn_dims, Activation::kRelu, Activation::kIdentity, proj);
    w.layers.push_back(std::move(layer));
  }
  w.head = seeded_init(rng, kVocabSize, dim, proj);
  return w;
}

TokenId greedy_pick(std::span<const double> logits, std::span<const TokenId> allowed) {
  if (allowed.empty()) fail(ErrorKind::kInput, "no allowed tokens");
  TokenId best = allowed.front();
  for (TokenId id : allowed) {
    if (logits[id] > logits[best] || (logits[id] == logits[best] && id < best)) best = id;
  }
  return best;
}

namespace {

Vector rms_norm(std::span<const double> x) {
  double ms = 0.0;
  for (double v : x) ms += v * v;
  const double inv = 1.0 / std::sqrt(ms / static_cast<double>(x.size()) + 1e-6);
  Vector out(x.begin(), x.end());
  for (double& v : out) v *= inv;
  return out;
}

// Incremental decoder state: per-layer key/value caches.
class Decoder {
 public:
  explicit Decoder(const ToyLmWeights& w) : w_(w), keys_(w.layers.size()), values_(w.layers.size()) {
    const std::size_t d = w.dim;
    inv_freq_.resize(d / 2);
    for (std::size_t i = 0; i < d / 2; ++i) {
      inv_freq_[i] = 1.0 / std::pow(10000.0, static_cast<double>(2 * i) / static_cast<double>(d));
    }
  }

  std::size_t position() const noexcept { return position_; }

  /// Feeds one input embedding; returns the final hidden state. When
  /// attention is non-null it receives each layer's weights for this step.
  Vector feed(std::span<const double> input, std::vector<Vector>* attention = nullptr) {
    const std::size_t d = w_.dim;
    Vector x(input.begin(), input.end());
    for (std::size_t i = 0; i < d / 2; ++i) {
      const double a = static_cast<double>(position_) * inv_freq_[i];
      x[2 * i] += std::sin(a);
      x[2 * i + 1] += std::cos(a);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t l = 0; l < w_.layers.size(); ++l) {
      const auto& layer = w_.layers[l];
      const Vector xn = rms_norm(x);
      const Vector q = matvec(layer.wq, xn);
      const Vector k = matvec(layer.wk, xn);
      const Vector v = matvec(layer.wv, xn);
      keys_[l].insert(keys_[l].end(), k.begin(), k.end());
      values_[l].insert(values_[l].end(), v.begin(), v.end());
      const std::size_t n = position_ + 1;
      Vector scores(n);
      for (std::size_t j = 0; j < n; ++j) {
        const double* kj = keys_[l].data() + j * d;
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += q[i] * kj[i];
        scores[j] = s * scale;
      }
      softmax_inplace(scores);
      Vector ctx(d, 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        const double* vj = values_[l].data() + j * d;
        for (std::size_t i = 0; i < d; ++i) ctx[i] += scores[j] * vj[i];
      }
      const Vector attn_out = matvec(layer.wo, ctx);
      for (std::size_t i = 0; i < d; ++i) x[i] += attn_out[i];
      const Vector ff = mlp_forward(layer.ffn, rms_norm(x));
      for (std::size_t i = 0; i < d; ++i) x[i] += ff[i];
      if (attention) attention->push_back(std::move(scores));
    }
    ++position_;
    return x;
  }

  Vector logits(std::span<const double> hidden) const {
    return matvec(w_.head, rms_norm(hidden));
  }

 private:
  const ToyLmWeights& w_;
  Vector inv_freq_;
  std::vector<std::vector<double>> keys_;
  std::vector<std::vector<double>> values_;
  std::size_t position_ = 0;
};

// Walks the five-line answer contract and reports which bytes may come next.
class ContractCursor {
 public:
  ContractCursor() {
    auto lit = [this](std::string s) { pieces_.push_back({Piece::kLiteral, std::move(s), 0}); };
    auto word = [this](std::size_t max) { pieces_.push_back({Piece::kWord, "", max}); };
    auto score = [this] { pieces_.push_back({Piece::kScore, "", 2}); };
    lit("OBJECT: ");
    word(16);
    lit("\nMATERIAL: ");
    word(16);
    for (const char* key : {"\nHARDNESS: ", "\nELASTICITY: ", "\nROUGHNESS: "}) {
      lit(key);
      score();
      lit(" | ");
      word(24);
    }
    lit("\n");
  }

  bool done() const noexcept { return index_ >= pieces_.size(); }

  std::vector<TokenId> allowed() const {
    if (done()) return {kEosToken};
    const Piece& p = pieces_[index_];
    switch (p.kind) {
      case Piece::kLiteral:
        return {static_cast<unsigned char>(p.literal[offset_])};
      case Piece::kWord: {
        const auto term = static_cast<TokenId>(static_cast<unsigned char>(terminator()));
        if (offset_ == p.max_len) return {term};
        std::vector<TokenId> out;
        const bool after_letter = offset_ > 0 && last_ != ' ';
        if (after_letter) out.push_back(term);
        if (after_letter && offset_ + 1 < p.max_len) out.push_back(' ');
        for (TokenId c = 'a'; c <= 'z'; ++c) out.push_back(c);
        std::sort(out.begin(), out.end());
        return out;
      }
      case Piece::kScore:
        if (offset_ == 0) {
          std::vector<TokenId> out;
          for (TokenId c = '1'; c <= '9'; ++c) out.push_back(c);
          return out;
        }
        return {static_cast<TokenId>(terminator()), '0'};
    }
    return {kEosToken};
  }

  void advance(TokenId token) {
    const Piece& p = pieces_[index_];
    const char ch = static_cast<char>(token);
    switch (p.kind) {
      case Piece::kLiteral:
        if (++offset_ == p.literal.size()) next(0);
        break;
      case Piece::kWord:
        if (offset_ > 0 && ch == terminator()) {
          next(1);
        } else {
          ++offset_;
          last_ = ch;
        }
        break;
      case Piece::kScore:
        if (offset_ == 0 && ch == '1') {
          offset_ = 1;
        } else if (offset_ == 1 && ch == terminator()) {
          next(1);
        } else {
          next(0);
        }
        break;
    }
  }

 private:
  struct Piece {
    enum Kind { kLiteral, kWord, kScore } kind;
    std::string literal;
    std::size_t max_len;
  };

  char terminator() const { return pieces_[index_ + 1].literal.front(); }

  // Moves to the following piece, `consumed` of its bytes already emitted.
  void next(std::size_t consumed) {
    ++index_;
    offset_ = consumed;
    last_ = 0;
    if (!done() && pieces_[index_].kind == Piece::kLiteral &&
        offset_ == pieces_[index_].literal.size()) {
      next(0);
    }
  }

  std::vector<Piece> pieces_;
  std::size_t index_ = 0;
  std::size_t offset_ = 0;
  char last_ = 0;
};

TokenId sample(std::span<const double> logits, std::span<const TokenId> allowed,
               double temperature, Rng& rng) {
  Vector p(allowed.size());
  for (std::size_t i = 0; i < allowed.size(); ++i) p[i] = logits[allowed[i]] / temperature;
  softmax_inplace(p);
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t i = 0; i < allowed.size(); ++i) {
    acc += p[i];
    if (u < acc) return allowed[i];
  }
  return allowed.back();
}

}  // namespace

ToyLm::ToyLm(ToyLmWeights weights, std::uint64_t seed)
    : ToyLm(std::move(weights), seed, Options{}) {}

ToyLm::ToyLm(ToyLmWeights weights, std::uint64_t seed, Options options)
    : weights_(std::move(weights)), seed_(seed), options_(options) {
  if (weights_.embedding.rows() != kVocabSize || weights_.head.rows() != kVocabSize ||
      weights_.embedding.cols() != weights_.dim || weights_.head.cols() != weights_.dim) {
    fail(ErrorKind::kShape, "ToyLM embedding/head must be vocab x dim");
  }
}

FirstStepTrace ToyLm::inspect(const MultimodalSequence& sequence) const {
  if (sequence.dim() != weights_.dim) {
    fail(ErrorKind::kShape, "sequence dim " + std::to_string(sequence.dim()) +
                                " != ToyLM dim " + std::to_string(weights_.dim));
  }
  Decoder decoder(weights_);
  FirstStepTrace trace;
  Vector hidden;
  for (std::size_t i = 0; i < sequence.length(); ++i) {
    const bool last = i + 1 == sequence.length();
    hidden = decoder.feed(sequence[i], last ? &trace.attention : nullptr);
  }
  if (!hidden.empty()) trace.logits = decoder.logits(hidden);
  return trace;
}

GenerationResult ToyLm::generate(const GenerationRequest& request) const {
  const auto started = std::chrono::steady_clock::now();
  validate_request(request, RequestKind::kEmbeddings);
  const MultimodalSequence& sequence = *request.sequence;
  if (sequence.dim() != weights_.dim) {
    fail(ErrorKind::kShape, "sequence dim " + std::to_string(sequence.dim()) +
                                " != ToyLM dim " + std::to_string(weights_.dim));
  }

  Decoder decoder(weights_);
  Vector hidden(weights_.dim, 0.0);
  for (std::size_t i = 0; i < sequence.length(); ++i) hidden = decoder.feed(sequence[i]);

  Rng rng(seed_);
  ContractCursor cursor;
  std::vector<TokenId> free_vocab;
  for (TokenId id = 0; id < kVocabSize; ++id) {
    if (id != kBosToken) free_vocab.push_back(id);
  }

  GenerationResult result;
  result.finish_reason = FinishReason::kLength;
  for (int step = 0; step < request.max_tokens; ++step) {
    std::vector<TokenId> allowed;
    if (options_.constrain_to_contract) {
      allowed = cursor.allowed();
    } else {
      allowed = free_vocab;
      // Never stop before emitting anything.
      if (step == 0) std::erase(allowed, kEosToken);
    }
    TokenId token;
    if (allowed.size() == 1) {
      token = allowed.front();
    } else {
      const Vector logits = decoder.logits(hidden);
      token = request.temperature == 0.0
                  ? greedy_pick(logits, allowed)
                  : sample(logits, allowed, request.temperature, rng);
    }
    if (token == kEosToken) {
      result.finish_reason = FinishReason::kStop;
      break;
    }
    result.text.push_back(static_cast<char>(token));
    if (options_.constrain_to_contract) cursor.advance(token);
    hidden = decoder.feed(weights_.embedding.row(token));
  }
  if (options_.constrain_to_contract && cursor.done() &&
      result.finish_reason == FinishReason::kLength) {
    result.finish_reason = FinishReason::kStop;
  }
  result.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - started)
                          .count();
  return result;
}

}  // namespace vital
