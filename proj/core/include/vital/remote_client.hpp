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

// Chat-completion style HTTP client for real vision-language services.
//
// Request:  POST {model, messages: [{role, content: [{type: "text", text} |
//           {type: "image", data, media_type}]}], max_tokens, temperature}
// Response: choices[0].message.content is the generated text.
//
// Tactile frames travel as ordinary image attachments; remote services cannot
// take raw embeddings, so the embedding-level path exists only for ToyLM.

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <string_view>

#include "vital/backend.hpp"

namespace vital {

struct RetryPolicy {
  int max_attempts = 3;
  std::int64_t base_delay_ms = 500;
  double multiplier = 2.0;
  std::set<int> retryable_statuses = {429, 500, 502, 503};

  /// Delay before retry k (k = 0 for the wait after the first failure):
  /// base_delay_ms * multiplier^k.
  std::chrono::milliseconds delay_for(int k) const;
  /// Throws kConfig unless max_attempts >= 1, base_delay_ms >= 0, multiplier > 1.
  void validate() const;
};

inline constexpr std::string_view kRemoteUrlEnv = "VITAL_REMOTE_URL";
inline constexpr std::string_view kRemoteApiKeyEnv = "VITAL_REMOTE_API_KEY";

struct RemoteEndpoint {
  std::string url;  // scheme://host[:port][/path]
  std::string api_key;
  std::string model;
  std::int64_t timeout_ms = 60000;
};

/// Fills url/api_key from VITAL_REMOTE_URL / VITAL_REMOTE_API_KEY when the
/// fields are empty.
RemoteEndpoint endpoint_with_env(RemoteEndpoint endpoint);

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// std::this_thread::sleep_for.
Sleeper real_sleeper();

std::string build_chat_request_json(const GenerationRequest& request,
                                    std::string_view model);

/// Extracts choices[0].message.content; kDecode on any structural problem or
/// empty content. finish_reason "length" maps to kLength, anything else kStop.
GenerationResult parse_chat_response(std::string_view body);

/// Sends the request, retrying retryable statuses and transport failures
/// with exponential backoff. Never issues more than policy.max_attempts
/// requests. Errors: kConfig (missing URL/credential), ProtocolError with
/// kProtocol (non-retryable status), kExhausted, kDecode.
GenerationResult remote_generate(const GenerationRequest& request,
                                 const RemoteEndpoint& endpoint,
                                 const RetryPolicy& policy,
                                 const Sleeper& sleeper = real_sleeper());

class RemoteBackend final : public LanguageModel {
 public:
  RemoteBackend(RemoteEndpoint endpoint, RetryPolicy policy,
                Sleeper sleeper = real_sleeper());

  std::string name() const override { return "remote"; }
  RequestKind input_kind() const override { return RequestKind::kMessages; }
  GenerationResult generate(const GenerationRequest& request) const override;

 private:
  RemoteEndpoint endpoint_;
  RetryPolicy policy_;
  Sleeper sleeper_;
};

std::string base64_encode(std::string_view bytes);

}  // namespace vital
