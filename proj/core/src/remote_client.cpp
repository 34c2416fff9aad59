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

#include "vital/remote_client.hpp"

#include <cmath>
#include <cstdlib>
#include <regex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "vital/error.hpp"

namespace vital {

std::chrono::milliseconds RetryPolicy::delay_for(int k) const {
  const double ms = static_cast<double>(base_delay_ms) * std::pow(multiplier, k);
  return std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(ms)));
}

void RetryPolicy::validate() const {
  if (max_attempts < 1) fail(ErrorKind::kConfig, "retry max_attempts must be >= 1");
  if (base_delay_ms < 0) fail(ErrorKind::kConfig, "retry base_delay_ms must be >= 0");
  if (!(multiplier > 1.0)) fail(ErrorKind::kConfig, "retry multiplier must be > 1");
}

RemoteEndpoint endpoint_with_env(RemoteEndpoint endpoint) {
  if (endpoint.url.empty()) {
    if (const char* v = std::getenv(std::string(kRemoteUrlEnv).c_str())) endpoint.url = v;
  }
  if (endpoint.api_key.empty()) {
    if (const char* v = std::getenv(std::string(kRemoteApiKeyEnv).c_str())) endpoint.api_key = v;
  }
  return endpoint;
}

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string base64_encode(std::string_view bytes) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                       (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                       static_cast<unsigned char>(bytes[i + 2]);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i < bytes.size()) {
    unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
    if (i + 1 < bytes.size()) v |= static_cast<unsigned char>(bytes[i + 1]) << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += i + 1 < bytes.size() ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::string build_chat_request_json(const GenerationRequest& request,
                                    std::string_view model) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& message : request.messages) {
    nlohmann::json content = nlohmann::json::array();
    for (const auto& part : message.parts) {
      if (part.kind == ChatPart::Kind::kText) {
        content.push_back({{"type", "text"}, {"text", part.text}});
      } else {
        content.push_back(
            {{"type", "image"}, {"data", part.data}, {"media_type", part.media_type}});
      }
    }
    messages.push_back({{"role", message.role}, {"content", std::move(content)}});
  }
  nlohmann::json body = {{"model", model},
                         {"messages", std::move(messages)},
                         {"max_tokens", request.max_tokens},
                         {"temperature", request.temperature}};
  return body.dump();
}

GenerationResult parse_chat_response(std::string_view body) {
  nlohmann::json j = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) fail(ErrorKind::kDecode, "response body is not JSON");
  const auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) {
    fail(ErrorKind::kDecode, "response has no choices");
  }
  const auto& first = (*choices)[0];
  const auto message = first.find("message");
  if (message == first.end() || !message->is_object()) {
    fail(ErrorKind::kDecode, "choices[0] has no message");
  }
  const auto content = message->find("content");
  if (content == message->end() || !content->is_string()) {
    fail(ErrorKind::kDecode, "choices[0].message.content is not a string");
  }
  GenerationResult result;
  result.text = content->get<std::string>();
  if (result.text.empty()) fail(ErrorKind::kDecode, "empty completion text");
  const auto reason = first.find("finish_reason");
  result.finish_reason = (reason != first.end() && reason->is_string() &&
                          reason->get<std::string>() == "length")
                             ? FinishReason::kLength
                             : FinishReason::kStop;
  return result;
}

namespace {

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  static const std::regex kUrl(R"(^(https?)://([^/\s]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, kUrl)) {
    fail(ErrorKind::kConfig, "remote URL must look like http(s)://host[:port]/path");
  }
  ParsedUrl out;
  out.base = m[1].str() + "://" + m[2].str();
  out.path = m[3].matched ? m[3].str() : "/";
  return out;
}

}  // namespace

GenerationResult remote_generate(const GenerationRequest& request,
                                 const RemoteEndpoint& endpoint,
                                 const RetryPolicy& policy, const Sleeper& sleeper) {
  policy.validate();
  validate_request(request, RequestKind::kMessages);
  if (endpoint.url.empty()) {
    fail(ErrorKind::kConfig, "no remote URL (set " + std::string(kRemoteUrlEnv) + ")");
  }
  if (endpoint.api_key.empty()) {
    fail(ErrorKind::kConfig, "no remote credential (set " +
                                 std::string(kRemoteApiKeyEnv) + ")");
  }
  const ParsedUrl url = split_url(endpoint.url);
  const std::string body = build_chat_request_json(request, endpoint.model);

  httplib::Client client(url.base);
  const auto timeout = std::chrono::milliseconds(endpoint.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  const httplib::Headers headers = {{"Authorization", "Bearer " + endpoint.api_key}};

  const auto started = std::chrono::steady_clock::now();
  std::string last_failure;
  int last_status = 0;
  for (int attempt = 0; attempt < policy.max_attempts; ++attempt) {
    auto response = client.Post(url.path, headers, body, "application/json");
    if (response) {
      last_status = response->status;
      if (response->status >= 200 && response->status < 300) {
        GenerationResult result = parse_chat_response(response->body);
        result.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - started)
                                .count();
        return result;
      }
      if (!policy.retryable_statuses.contains(response->status)) {
        throw ProtocolError(ErrorKind::kProtocol, response->status,
                            "remote service returned HTTP " +
                                std::to_string(response->status));
      }
      last_failure = "HTTP " + std::to_string(response->status);
    } else {
      last_status = 0;
      last_failure = "transport failure: " + httplib::to_string(response.error());
    }
    if (attempt + 1 < policy.max_attempts) sleeper(policy.delay_for(attempt));
  }
  throw ProtocolError(ErrorKind::kExhausted, last_status,
                      std::to_string(policy.max_attempts) +
                          " attempts failed; last: " + last_failure);
}

RemoteBackend::RemoteBackend(RemoteEndpoint endpoint, RetryPolicy policy,
                             Sleeper sleeper)
    : endpoint_(std::move(endpoint)), policy_(std::move(policy)),
      sleeper_(std::move(sleeper)) {
  policy_.validate();
}

GenerationResult RemoteBackend::generate(const GenerationRequest& request) const {
  return remote_generate(request, endpoint_, policy_, sleeper_);
}

}  // namespace vital
