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

#include <cstdlib>

#include "json.hpp"
#include "support/fixtures.hpp"
#include "vital/remote_client.hpp"

namespace vital {
namespace {

using testing::MockChatServer;
using testing::throws_kind;

GenerationRequest text_request() {
  GenerationRequest r;
  r.messages.push_back({"user", {ChatPart::text_part("rate this")}});
  r.max_tokens = 64;
  return r;
}

struct RecordingSleeper {
  std::vector<std::chrono::milliseconds> delays;
  Sleeper fn() {
    return [this](std::chrono::milliseconds d) { delays.push_back(d); };
  }
};

RemoteEndpoint endpoint_for(const MockChatServer& server) {
  RemoteEndpoint e;
  e.url = server.url();
  e.api_key = "test-key";
  e.model = "mock-model";
  e.timeout_ms = 5000;
  return e;
}

TEST(RetryPolicy, ExponentialDelays) {
  RetryPolicy p;
  EXPECT_EQ(p.delay_for(0).count(), 500);
  EXPECT_EQ(p.delay_for(1).count(), 1000);
  EXPECT_EQ(p.delay_for(2).count(), 2000);
  p.max_attempts = 0;
  EXPECT_TRUE(throws_kind(ErrorKind::kConfig, [&] { p.validate(); }));
  p = RetryPolicy{};
  p.multiplier = 1.0;
  EXPECT_TRUE(throws_kind(ErrorKind::kConfig, [&] { p.validate(); }));
}

TEST(RemoteClient, RetriesRateLimitsThenSucceeds) {
  MockChatServer server({429, 429, 200}, testing::chat_reply("OBJECT: cup"));
  RecordingSleeper sleeper;
  const auto result =
      remote_generate(text_request(), endpoint_for(server), RetryPolicy{}, sleeper.fn());
  EXPECT_EQ(result.text, "OBJECT: cup");
  EXPECT_EQ(server.requests(), 3);
  ASSERT_EQ(sleeper.delays.size(), 2u);
  EXPECT_EQ(sleeper.delays[0].count(), 500);
  EXPECT_EQ(sleeper.delays[1].count(), 1000);
  EXPECT_EQ(server.last_authorization(), "Bearer test-key");
}

TEST(RemoteClient, StopsAfterMaxAttempts) {
  MockChatServer server({500, 500, 500, 500, 500});
  RecordingSleeper sleeper;
  try {
    (void)remote_generate(text_request(), endpoint_for(server), RetryPolicy{}, sleeper.fn());
    FAIL() << "expected exhaustion";
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kExhausted);
    EXPECT_EQ(e.status(), 500);
  }
  EXPECT_EQ(server.requests(), 3);
  EXPECT_EQ(sleeper.delays.size(), 2u);
}

TEST(RemoteClient, NonRetryableStatusFailsImmediately) {
  MockChatServer server({401});
  RecordingSleeper sleeper;
  try {
    (void)remote_generate(text_request(), endpoint_for(server), RetryPolicy{}, sleeper.fn());
    FAIL() << "expected a protocol error";
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kProtocol);
    EXPECT_EQ(e.status(), 401);
  }
  EXPECT_EQ(server.requests(), 1);
  EXPECT_TRUE(sleeper.delays.empty());
}

TEST(RemoteClient, TransportFailuresAreRetried) {
  int port = 0;
  {
    MockChatServer probe({200});
    const auto url = probe.url();
    port = std::stoi(url.substr(url.rfind(':') + 1));
  }
  RemoteEndpoint e;
  e.url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  e.api_key = "k";
  e.timeout_ms = 500;
  RecordingSleeper sleeper;
  EXPECT_TRUE(throws_kind(ErrorKind::kExhausted,
                          [&] { (void)remote_generate(text_request(), e, RetryPolicy{}, sleeper.fn()); }));
  EXPECT_EQ(sleeper.delays.size(), 2u);
}

TEST(RemoteClient, MalformedBodiesAreDecodeErrors) {
  MockChatServer server({200}, "{\"choices\": []}");
  EXPECT_TRUE(throws_kind(ErrorKind::kDecode, [&] {
    (void)remote_generate(text_request(), endpoint_for(server), RetryPolicy{}, [](auto) {});
  }));
  EXPECT_TRUE(throws_kind(ErrorKind::kDecode, [] { (void)parse_chat_response("not json"); }));
  EXPECT_TRUE(throws_kind(ErrorKind::kDecode, [] {
    (void)parse_chat_response(testing::chat_reply(""));
  }));
  EXPECT_EQ(parse_chat_response(testing::chat_reply("x", "length")).finish_reason,
            FinishReason::kLength);
}

TEST(RemoteClient, RequestBodyCarriesTextAndImages) {
  MockChatServer server({200});
  GenerationRequest r = text_request();
  r.messages[0].parts.push_back(ChatPart::image_part(base64_encode("P5 1 1 255 x"),
                                                     "image/x-portable-graymap"));
  (void)remote_generate(r, endpoint_for(server), RetryPolicy{}, [](auto) {});
  const auto body = nlohmann::json::parse(server.last_body());
  EXPECT_EQ(body["model"], "mock-model");
  EXPECT_EQ(body["max_tokens"], 64);
  const auto& content = body["messages"][0]["content"];
  ASSERT_EQ(content.size(), 2u);
  EXPECT_EQ(content[0]["type"], "text");
  EXPECT_EQ(content[1]["type"], "image");
  EXPECT_EQ(content[1]["media_type"], "image/x-portable-graymap");
}

TEST(RemoteClient, MissingConfigurationIsAConfigError) {
  RemoteEndpoint e;
  e.api_key = "k";
  EXPECT_TRUE(throws_kind(ErrorKind::kConfig,
                          [&] { (void)remote_generate(text_request(), e, RetryPolicy{}, [](auto) {}); }));
  e.url = "ftp://host/x";
  EXPECT_TRUE(throws_kind(ErrorKind::kConfig,
                          [&] { (void)remote_generate(text_request(), e, RetryPolicy{}, [](auto) {}); }));
  e.url = "http://127.0.0.1:1/x";
  e.api_key.clear();
  EXPECT_TRUE(throws_kind(ErrorKind::kConfig,
                          [&] { (void)remote_generate(text_request(), e, RetryPolicy{}, [](auto) {}); }));
}

TEST(RemoteClient, EnvironmentFillsEndpoint) {
  ::setenv("VITAL_REMOTE_URL", "http://example.invalid/v1", 1);
  ::setenv("VITAL_REMOTE_API_KEY", "env-key", 1);
  const auto e = endpoint_with_env(RemoteEndpoint{});
  EXPECT_EQ(e.url, "http://example.invalid/v1");
  EXPECT_EQ(e.api_key, "env-key");
  RemoteEndpoint explicit_url;
  explicit_url.url = "http://other/v1";
  EXPECT_EQ(endpoint_with_env(explicit_url).url, "http://other/v1");
  ::unsetenv("VITAL_REMOTE_URL");
  ::unsetenv("VITAL_REMOTE_API_KEY");
}

TEST(Base64, KnownVectors) {
  EXPECT_EQ(base64_encode(""), "");
  EXPECT_EQ(base64_encode("f"), "Zg==");
  EXPECT_EQ(base64_encode("fo"), "Zm8=");
  EXPECT_EQ(base64_encode("foobar"), "Zm9vYmFy");
}

}  // namespace
}  // namespace vital
