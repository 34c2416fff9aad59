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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vital/assembly.hpp"

namespace vital {

struct ChatPart {
  enum class Kind { kText, kImage };
  Kind kind = Kind::kText;
  std::string text;        // kText
  std::string data;        // kImage: base64 payload
  std::string media_type;  // kImage: e.g. image/x-portable-pixmap

  static ChatPart text_part(std::string text);
  static ChatPart image_part(std::string base64, std::string media_type);
};

struct ChatMessage {
  std::string role;
  std::vector<ChatPart> parts;
};

/// What a backend reads from a GenerationRequest.
enum class RequestKind {
  kEmbeddings,  // sequence
  kMessages,    // messages
  kObjectId,    // object_id only (fixtures)
};

struct GenerationRequest {
  std::optional<MultimodalSequence> sequence;
  std::vector<ChatMessage> messages;
  std::string object_id;
  int max_tokens = 256;
  double temperature = 0.0;
};

enum class FinishReason { kLength, kStop, kError };

std::string_view to_string(FinishReason reason);

struct GenerationResult {
  std::string text;
  FinishReason finish_reason = FinishReason::kStop;
  std::int64_t latency_ms = 0;
};

/// Uniform language-model interface. generate() is const: implementations
/// must be safe to call concurrently from several threads.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual std::string name() const = 0;
  virtual RequestKind input_kind() const = 0;
  virtual GenerationResult generate(const GenerationRequest& request) const = 0;
};

/// Throws kConfig unless max_tokens >= 1, temperature >= 0 and exactly the
/// field for kind is populated (object_id may accompany any kind).
void validate_request(const GenerationRequest& request, RequestKind kind);

/// Fixture backend returning canned text per object id.
class ScriptedBackend final : public LanguageModel {
 public:
  explicit ScriptedBackend(std::map<std::string, std::string> script);

  std::string name() const override { return "scripted"; }
  RequestKind input_kind() const override { return RequestKind::kObjectId; }
  /// Throws kFixture for an empty script, a request without object_id or an
  /// id absent from the script.
  GenerationResult generate(const GenerationRequest& request) const override;

  const std::map<std::string, std::string>& script() const noexcept { return script_; }

 private:
  std::map<std::string, std::string> script_;
};

/// Loads {"object_id": "canned text", ...} from a JSON file.
std::map<std::string, std::string> load_script(const std::string& path);

}  // namespace vital
