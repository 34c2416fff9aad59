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

#include "vital/backend.hpp"

#include <fstream>

#include "json.hpp"

#include "vital/error.hpp"

namespace vital {

ChatPart ChatPart::text_part(std::string text) {
  ChatPart p;
  p.kind = Kind::kText;
  p.text = std::move(text);
  return p;
}

ChatPart ChatPart::image_part(std::string base64, std::string media_type) {
  ChatPart p;
  p.kind = Kind::kImage;
  p.data = std::move(base64);
  p.media_type = std::move(media_type);
  return p;
}

std::string_view to_string(FinishReason reason) {
  switch (reason) {
    case FinishReason::kLength: return "length";
    case FinishReason::kStop: return "stop";
    case FinishReason::kError: return "error";
  }
  return "unknown";
}

void validate_request(const GenerationRequest& request, RequestKind kind) {
  if (request.max_tokens < 1) fail(ErrorKind::kConfig, "max_tokens must be >= 1");
  if (!(request.temperature >= 0.0)) fail(ErrorKind::kConfig, "temperature must be >= 0");
  const bool has_sequence = request.sequence.has_value();
  const bool has_messages = !request.messages.empty();
  switch (kind) {
    case RequestKind::kEmbeddings:
      if (!has_sequence || has_messages) {
        fail(ErrorKind::kConfig, "embedding backends need a sequence and no messages");
      }
      break;
    case RequestKind::kMessages:
      if (!has_messages || has_sequence) {
        fail(ErrorKind::kConfig, "message backends need messages and no sequence");
      }
      break;
    case RequestKind::kObjectId:
      if (request.object_id.empty()) {
        fail(ErrorKind::kFixture, "request carries no object_id");
      }
      break;
  }
}

ScriptedBackend::ScriptedBackend(std::map<std::string, std::string> script)
    : script_(std::move(script)) {}

GenerationResult ScriptedBackend::generate(const GenerationRequest& request) const {
  if (script_.empty()) fail(ErrorKind::kFixture, "scripted backend has an empty script");
  validate_request(request, RequestKind::kObjectId);
  const auto it = script_.find(request.object_id);
  if (it == script_.end()) {
    std::string known;
    for (const auto& [id, _] : script_) known += (known.empty() ? "" : ", ") + id;
    fail(ErrorKind::kFixture, "object id '" + request.object_id +
                                  "' is missing from the script (has: " + known + ")");
  }
  return {it->second, FinishReason::kStop, 0};
}

std::map<std::string, std::string> load_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open script " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kValidation, "script " + path + ": " + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::kValidation, "script " + path + " must be a JSON object");
  std::map<std::string, std::string> script;
  for (const auto& [id, text] : j.items()) {
    if (!text.is_string()) {
      fail(ErrorKind::kValidation, "script entry '" + id + "' must be a string");
    }
    script.emplace(id, text.get<std::string>());
  }
  return script;
}

}  // namespace vital
