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

#include "support/fixtures.hpp"

#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "vital/prompting.hpp"

namespace vital::testing {

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = fs::temp_directory_path() /
          ("vital-test-" + std::to_string(stamp) + "-" + std::to_string(rd()) + "-" +
           std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Image pattern_image(std::size_t width, std::size_t height, std::size_t channels,
                    std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> noise(0.0, 0.2);
  std::vector<double> px(width * height * channels);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      for (std::size_t c = 0; c < channels; ++c) {
        const double base = 0.3 * static_cast<double>(x) / static_cast<double>(width) +
                            0.3 * static_cast<double>(y) / static_cast<double>(height) +
                            0.1 * static_cast<double>(c);
        px[(y * width + x) * channels + c] = base + noise(gen);
      }
    }
  }
  return Image(width, height, channels, std::move(px));
}

std::vector<FixtureObject> rank_perfect_objects() {
  return {
      {"sponge", "kitchen sponge", "foam", 20.0, 1.0, 8.0, 2, 8, 8},
      {"eraser", "rubber eraser", "rubber", 50.0, 10.0, 2.0, 5, 5, 5},
      {"mug", "ceramic mug", "ceramic", 90.0, 1000.0, 0.5, 9, 2, 2},
  };
}

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

fs::path write_dataset(const fs::path& dir, const std::vector<FixtureObject>& objects,
                       std::size_t frames, TactileStorage storage) {
  fs::create_directories(dir);
  std::ostringstream manifest;
  std::uint64_t seed = 1;
  for (const auto& o : objects) {
    const fs::path obj_dir = dir / o.object_id;
    fs::create_directories(obj_dir);
    write_netpbm(obj_dir / "image.ppm", pattern_image(32, 24, 3, seed++));
    std::vector<Image> clip;
    for (std::size_t f = 0; f < frames; ++f) clip.push_back(pattern_image(16, 16, 1, seed++));

    nlohmann::ordered_json j;
    j["object_id"] = o.object_id;
    j["name"] = o.name;
    j["material_category"] = o.category;
    j["image_path"] = o.object_id + "/image.ppm";
    switch (storage) {
      case TactileStorage::kFramePaths: {
        std::vector<std::string> paths;
        for (std::size_t f = 0; f < frames; ++f) {
          const std::string name = o.object_id + "/frame" + std::to_string(100 + f) + ".pgm";
          write_netpbm(dir / name, clip[f]);
          paths.push_back(name);
        }
        j["tactile_frame_paths"] = paths;
        break;
      }
      case TactileStorage::kFrameDirectory: {
        fs::create_directories(obj_dir / "tactile");
        for (std::size_t f = 0; f < frames; ++f) {
          write_netpbm(obj_dir / "tactile" / ("f" + std::to_string(100 + f) + ".pgm"), clip[f]);
        }
        j["tactile_video_path"] = o.object_id + "/tactile";
        break;
      }
      case TactileStorage::kSequenceFile:
        write_netpbm_sequence(obj_dir / "tactile.pgm", clip);
        j["tactile_video_path"] = o.object_id + "/tactile.pgm";
        break;
    }
    j["ground_truth"] = {{"shore_hardness", o.shore_hardness},
                         {"elastic_modulus", o.elastic_modulus},
                         {"roughness_ra", o.roughness_ra}};
    manifest << j.dump() << "\n";
  }
  const fs::path path = dir / "manifest.jsonl";
  write_file(path, manifest.str());
  return path;
}

std::string contract_for(const FixtureObject& object) {
  PropertyScores s;
  s.object_name = object.name;
  s.material = object.category;
  s.hardness = object.hardness_score;
  s.elasticity = object.elasticity_score;
  s.roughness = object.roughness_score;
  s.rationales = {{Property::kHardness, "press response"},
                  {Property::kElasticity, "rebound"},
                  {Property::kRoughness, "texture"}};
  return render_contract(s);
}

fs::path write_script(const fs::path& dir, const std::map<std::string, std::string>& script) {
  const nlohmann::json j = script;
  const fs::path path = dir / "script.json";
  write_file(path, j.dump(2));
  return path;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::map<std::string, std::string> snapshot_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_text(e.path());
  }
  return out;
}

bool throws_kind(ErrorKind kind, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == kind;
  } catch (...) {
    return false;
  }
  return false;
}

struct MockChatServer::Impl {
  httplib::Server server;
};

MockChatServer::MockChatServer(std::vector<int> statuses, std::string reply)
    : impl_(std::make_unique<Impl>()), statuses_(std::move(statuses)), reply_(std::move(reply)) {
  if (reply_.empty()) reply_ = chat_reply("OBJECT: cup");
  impl_->server.Post(".*", [this](const httplib::Request& req, httplib::Response& res) {
    const int index = requests_++;
    {
      std::lock_guard lock(mutex_);
      last_body_ = req.body;
      last_auth_ = req.get_header_value("Authorization");
    }
    const int status =
        statuses_[std::min<std::size_t>(static_cast<std::size_t>(index), statuses_.size() - 1)];
    res.status = status;
    if (status >= 200 && status < 300) {
      res.set_content(reply_, "application/json");
    } else {
      res.set_content("{\"error\":\"scripted\"}", "application/json");
    }
  });
  port_ = impl_->server.bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

MockChatServer::~MockChatServer() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockChatServer::url() const {
  return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
}

std::string MockChatServer::last_body() const {
  std::lock_guard lock(mutex_);
  return last_body_;
}

std::string MockChatServer::last_authorization() const {
  std::lock_guard lock(mutex_);
  return last_auth_;
}

const std::vector<ReferenceBand>& reference_bands() {
  using P = Property;
  static const std::vector<ReferenceBand> kBands = {
      {P::kHardness, 1, 2, "Extremely soft", "Cotton, sponge"},
      {P::kHardness, 3, 4, "Soft", "Rubber ball, soft plastic toy"},
      {P::kHardness, 5, 6, "Medium", "Plastic container, shoe sole"},
      {P::kHardness, 7, 8, "Hard", "Wood, ceramic plate"},
      {P::kHardness, 9, 10, "Extremely hard", "Metal, diamond"},
      {P::kElasticity, 1, 2, "Minimal elasticity", "Clay, dry sponge, wooden ruler"},
      {P::kElasticity, 3, 4, "Low elasticity", "Rubber eraser, hard plastic, book cover"},
      {P::kElasticity, 5, 6, "Medium elasticity", "Foam ball, silicone, thick rubber mat"},
      {P::kElasticity, 7, 8, "High elasticity", "Rubber band, bouncy ball, yoga mat"},
      {P::kElasticity, 9, 10, "Maximum elasticity",
       "Trampoline surface, latex sheet, inflated balloon"},
      {P::kRoughness, 1, 2, "Extremely smooth", "Glass, polished marble"},
      {P::kRoughness, 3, 4, "Smooth", "Plastic surface, ceramic mug"},
      {P::kRoughness, 5, 6, "Medium texture", "Paper, leather, cardboard"},
      {P::kRoughness, 7, 8, "Rough", "Sandpaper, concrete, bark of a tree"},
      {P::kRoughness, 9, 10, "Extremely rough", "Gravel, coarse fabric, pumice stone"},
  };
  return kBands;
}

std::string chat_reply(const std::string& content, const std::string& finish) {
  nlohmann::json j;
  j["choices"] = nlohmann::json::array(
      {{{"message", {{"role", "assistant"}, {"content", content}}}, {"finish_reason", finish}}});
  return j.dump();
}

}  // namespace vital::testing
