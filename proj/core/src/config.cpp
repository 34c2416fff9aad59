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

#include <fstream>
#include <iterator>
#include <set>

#include "json.hpp"
#include "vital/error.hpp"
#include "vital/pipeline.hpp"

namespace vital {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::kToy: return "toy";
    case BackendKind::kScripted: return "scripted";
    case BackendKind::kRemote: return "remote";
  }
  return "unknown";
}

BackendKind parse_backend_kind(std::string_view name) {
  for (auto k : {BackendKind::kToy, BackendKind::kScripted, BackendKind::kRemote}) {
    if (name == to_string(k)) return k;
  }
  fail(ErrorKind::kConfig, "unknown backend '" + std::string(name) +
                               "' (expected toy, scripted or remote)");
}

void RunConfig::validate() const {
  if (dim == 0 || dim % 2 != 0) fail(ErrorKind::kConfig, "dim must be a positive even number");
  if (grid == 0) fail(ErrorKind::kConfig, "grid must be >= 1");
  if (stride_ms <= 0) fail(ErrorKind::kConfig, "stride_ms must be > 0");
  if (parallelism == 0) fail(ErrorKind::kConfig, "parallelism must be >= 1");
  if (backend.max_tokens < 1) fail(ErrorKind::kConfig, "max_tokens must be >= 1");
  if (!(backend.temperature >= 0.0)) fail(ErrorKind::kConfig, "temperature must be >= 0");
  if (backend.timeout_ms <= 0) fail(ErrorKind::kConfig, "timeout_ms must be > 0");
  if (run_id.empty() || run_id.find_first_of("/\\") != std::string::npos || run_id == "." ||
      run_id == "..") {
    fail(ErrorKind::kConfig, "run_id must be a plain directory name");
  }
  if (backend.kind == BackendKind::kScripted && backend.script_path.empty()) {
    fail(ErrorKind::kConfig, "scripted backend needs script_path");
  }
  if (p_value.method == PValueMethod::kMonteCarlo && p_value.resamples == 0) {
    fail(ErrorKind::kConfig, "resamples must be >= 1");
  }
  backend.retry.validate();
  validate_prompt_spec(prompt);
  // text:0 is the prompt, text:1 (optional) the user request.
  std::vector<std::size_t> text_uses(2, 0);
  std::size_t vision_uses = 0;
  std::size_t tactile_uses = 0;
  for (const auto& seg : layout) {
    if (seg.kind == SegmentKind::kVision) ++vision_uses;
    if (seg.kind == SegmentKind::kTactile) ++tactile_uses;
    if (seg.kind != SegmentKind::kText) continue;
    if (seg.text_part >= text_uses.size()) {
      fail(ErrorKind::kConfig, "layout references text:" + std::to_string(seg.text_part) +
                                   " but only text:0 and text:1 exist");
    }
    ++text_uses[seg.text_part];
  }
  if (vision_uses != 1 || tactile_uses != 1 || text_uses[0] != 1 || text_uses[1] > 1) {
    fail(ErrorKind::kConfig,
         "layout must place vision, tactile and text:0 exactly once (text:1 at most once)");
  }
}

ParseMode RunConfig::effective_mode() const {
  if (mode) return *mode;
  return backend.kind == BackendKind::kRemote ? ParseMode::kLenient : ParseMode::kStrict;
}

std::string RunConfig::effective_model_id() const {
  if (!model_id.empty()) return model_id;
  if (!backend.model.empty()) return backend.model;
  return std::string(to_string(backend.kind));
}

namespace {

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(ErrorKind::kConfig, std::string(where) + " must be an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || item.key() == a;
    if (!ok) {
      fail(ErrorKind::kConfig, "unknown key '" + item.key() + "' in " + std::string(where));
    }
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::kConfig, std::string("config key '") + key + "' has the wrong type");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kConfig, std::string(what) + " is not valid JSON: " + e.what());
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

PromptSpec prompt_from_json(const json& j) {
  check_keys(j, "prompt", {"version", "goal", "phase1_instructions", "phase2_instructions",
                           "scales", "constraints", "output_contract"});
  PromptSpec spec = default_prompt_spec();
  spec.version = get_or(j, "version", spec.version);
  spec.goal = get_or(j, "goal", spec.goal);
  spec.phase1_instructions = get_or(j, "phase1_instructions", spec.phase1_instructions);
  spec.phase2_instructions = get_or(j, "phase2_instructions", spec.phase2_instructions);
  spec.constraints = get_or(j, "constraints", spec.constraints);
  spec.output_contract = get_or(j, "output_contract", spec.output_contract);
  if (const auto it = j.find("scales"); it != j.end()) {
    if (!it->is_array()) fail(ErrorKind::kConfig, "prompt.scales must be an array");
    spec.scales.clear();
    for (const auto& s : *it) {
      check_keys(s, "prompt.scales[]", {"property", "bands"});
      RatingScale scale;
      scale.property = parse_property(get_or<std::string>(s, "property", ""));
      const auto bands = s.find("bands");
      if (bands == s.end() || !bands->is_array() || bands->size() != scale.bands.size()) {
        fail(ErrorKind::kConfig, "each scale needs exactly five bands");
      }
      for (std::size_t b = 0; b < scale.bands.size(); ++b) {
        const auto& jb = (*bands)[b];
        check_keys(jb, "band", {"lo", "hi", "characterization", "examples"});
        scale.bands[b] = {get_or(jb, "lo", 0), get_or(jb, "hi", 0),
                          get_or<std::string>(jb, "characterization", ""),
                          get_or<std::string>(jb, "examples", "")};
      }
      spec.scales.push_back(std::move(scale));
    }
  }
  validate_prompt_spec(spec);
  return spec;
}

}  // namespace

PromptSpec parse_prompt_spec(std::string_view text) {
  return prompt_from_json(parse_json(text, "prompt spec"));
}

RunConfig parse_run_config(std::string_view text, const fs::path& base_dir) {
  const json j = parse_json(text, "run config");
  check_keys(j, "config", {"backend", "seed", "dim", "grid", "stride_ms", "prompt", "name_hint",
                           "layout", "parallelism", "mode", "out_dir", "run_id", "dataset_id",
                           "model_id", "p_value", "persist"});
  RunConfig c;
  if (const auto it = j.find("backend"); it != j.end()) {
    const json& b = *it;
    check_keys(b, "backend", {"kind", "model", "url", "script_path", "max_tokens",
                              "temperature", "timeout_ms", "retry"});
    c.backend.kind = parse_backend_kind(get_or<std::string>(b, "kind", "toy"));
    c.backend.model = get_or(b, "model", c.backend.model);
    c.backend.url = get_or(b, "url", c.backend.url);
    if (b.contains("script_path")) {
      c.backend.script_path = resolve(base_dir, get_or<std::string>(b, "script_path", ""));
    }
    c.backend.max_tokens = get_or(b, "max_tokens", c.backend.max_tokens);
    c.backend.temperature = get_or(b, "temperature", c.backend.temperature);
    c.backend.timeout_ms = get_or(b, "timeout_ms", c.backend.timeout_ms);
    if (const auto r = b.find("retry"); r != b.end()) {
      check_keys(*r, "backend.retry",
                 {"max_attempts", "base_delay_ms", "multiplier", "retryable_statuses"});
      auto& p = c.backend.retry;
      p.max_attempts = get_or(*r, "max_attempts", p.max_attempts);
      p.base_delay_ms = get_or(*r, "base_delay_ms", p.base_delay_ms);
      p.multiplier = get_or(*r, "multiplier", p.multiplier);
      if (r->contains("retryable_statuses")) {
        const auto list = get_or<std::vector<int>>(*r, "retryable_statuses", {});
        p.retryable_statuses = std::set<int>(list.begin(), list.end());
      }
    }
  }
  c.seed = get_or(j, "seed", c.seed);
  c.dim = get_or(j, "dim", c.dim);
  c.grid = get_or(j, "grid", c.grid);
  c.stride_ms = get_or(j, "stride_ms", c.stride_ms);
  if (const auto it = j.find("prompt"); it != j.end()) {
    if (it->is_string()) {
      c.prompt = parse_prompt_spec(read_text(resolve(base_dir, it->get<std::string>())));
    } else {
      c.prompt = prompt_from_json(*it);
    }
  }
  c.name_hint = get_or(j, "name_hint", c.name_hint);
  if (j.contains("layout")) {
    const auto descriptors = get_or<std::vector<std::string>>(j, "layout", {});
    c.layout = parse_layout(descriptors);
  }
  c.parallelism = get_or(j, "parallelism", c.parallelism);
  if (j.contains("mode")) c.mode = parse_mode(get_or<std::string>(j, "mode", ""));
  if (j.contains("out_dir")) c.out_dir = resolve(base_dir, get_or<std::string>(j, "out_dir", ""));
  c.run_id = get_or(j, "run_id", c.run_id);
  c.dataset_id = get_or(j, "dataset_id", c.dataset_id);
  c.model_id = get_or(j, "model_id", c.model_id);
  if (const auto it = j.find("p_value"); it != j.end()) {
    check_keys(*it, "p_value", {"method", "seed", "resamples"});
    c.p_value.method = parse_p_value_method(get_or<std::string>(*it, "method", "auto"));
    c.p_value.seed = get_or(*it, "seed", c.seed);
    c.p_value.resamples = get_or(*it, "resamples", c.p_value.resamples);
  } else {
    c.p_value.seed = c.seed;
  }
  c.persist = get_or(j, "persist", c.persist);
  c.validate();
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  return parse_run_config(read_text(path), path.parent_path());
}

}  // namespace vital
