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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "vital/error.hpp"
#include "vital/image.hpp"
#include "vital/pipeline.hpp"

namespace vital::testing {

namespace fs = std::filesystem;

/// Unique directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const noexcept { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

/// Deterministic textured image.
Image pattern_image(std::size_t width, std::size_t height, std::size_t channels,
                    std::uint64_t seed);

struct FixtureObject {
  std::string object_id;
  std::string name;
  std::string category;
  double shore_hardness;
  double elastic_modulus;
  double roughness_ra;
  int hardness_score;
  int elasticity_score;
  int roughness_score;
};

/// Three objects whose scores rise with hardness and roughness and fall with
/// the modulus: raw rho is +1, -1, +1.
std::vector<FixtureObject> rank_perfect_objects();

enum class TactileStorage { kFramePaths, kFrameDirectory, kSequenceFile };

/// Writes images, tactile frames and manifest.jsonl; returns the manifest path.
fs::path write_dataset(const fs::path& dir, const std::vector<FixtureObject>& objects,
                       std::size_t frames = 12,
                       TactileStorage storage = TactileStorage::kFramePaths);

std::string contract_for(const FixtureObject& object);

/// Writes a JSON object of id -> response text; returns its path.
fs::path write_script(const fs::path& dir, const std::map<std::string, std::string>& script);

std::string read_text(const fs::path& path);

/// Every regular file under root, keyed by relative path.
std::map<std::string, std::string> snapshot_tree(const fs::path& root);

/// Runs fn and reports whether it threw vital::Error of the given kind.
bool throws_kind(ErrorKind kind, const std::function<void()>& fn);

/// Local HTTP server answering POST requests with a scripted status list.
/// Once the list is exhausted the last status repeats.
class MockChatServer {
 public:
  explicit MockChatServer(std::vector<int> statuses, std::string reply = "");
  ~MockChatServer();
  MockChatServer(const MockChatServer&) = delete;
  MockChatServer& operator=(const MockChatServer&) = delete;

  std::string url() const;
  int requests() const { return requests_.load(); }
  std::string last_body() const;
  std::string last_authorization() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::vector<int> statuses_;
  std::string reply_;
  std::atomic<int> requests_{0};
  mutable std::mutex mutex_;
  std::string last_body_;
  std::string last_auth_;
  int port_ = 0;
  std::thread thread_;
};

struct ReferenceBand {
  Property property;
  int lo;
  int hi;
  const char* characterization;
  const char* examples;
};

/// The fifteen published rating bands, transcribed independently of the
/// library's scale tables.
const std::vector<ReferenceBand>& reference_bands();

/// Chat-completions style body carrying content.
std::string chat_reply(const std::string& content, const std::string& finish = "stop");

}  // namespace vital::testing
