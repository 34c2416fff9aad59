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

#include "vital/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "json.hpp"
#include "vital/error.hpp"

namespace vital {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Manifest

namespace {

[[noreturn]] void line_fail(std::size_t line, const std::string& msg) {
  fail(ErrorKind::kValidation, "manifest line " + std::to_string(line) + ": " + msg);
}

bool valid_object_id(std::string_view id) {
  if (id.empty() || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

std::string required_string(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) line_fail(line, std::string("missing field '") + key + "'");
  if (!it->is_string() || it->get<std::string>().empty()) {
    line_fail(line, std::string("field '") + key + "' must be a non-empty string");
  }
  return it->get<std::string>();
}

double required_number(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) line_fail(line, std::string("missing field 'ground_truth.") + key + "'");
  if (!it->is_number()) line_fail(line, std::string("ground_truth.") + key + " must be a number");
  const double v = it->get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) {
    line_fail(line, std::string("ground_truth.") + key + " must be > 0");
  }
  return v;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

void require_exists(const fs::path& p, std::size_t line) {
  std::error_code ec;
  if (!fs::exists(p, ec)) line_fail(line, "file not found: " + p.string());
}

}  // namespace

std::vector<ManifestEntry> parse_manifest(std::string_view text, const fs::path& base_dir,
                                          bool check_files) {
  std::vector<ManifestEntry> entries;
  std::map<std::string, std::size_t> first_line;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
      line.remove_suffix(1);
    }
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) {
      line.remove_prefix(1);
    }
    if (line.empty() || line.front() == '#') continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error&) {
      line_fail(line_no, "not a JSON object");
    }
    if (!obj.is_object()) line_fail(line_no, "not a JSON object");
    for (const auto& item : obj.items()) {
      static const std::set<std::string> kKnown = {
          "object_id",           "name",          "material_category",
          "image_path",          "tactile_frame_paths", "tactile_video_path",
          "tactile_fps",         "ground_truth"};
      if (!kKnown.count(item.key())) line_fail(line_no, "unknown field '" + item.key() + "'");
    }

    ManifestEntry e;
    e.line = line_no;
    e.object_id = required_string(obj, "object_id", line_no);
    if (!valid_object_id(e.object_id)) {
      line_fail(line_no, "object_id '" + e.object_id +
                             "' may only contain letters, digits, '-', '_' and '.'");
    }
    if (const auto [it, fresh] = first_line.emplace(e.object_id, line_no); !fresh) {
      line_fail(line_no, "duplicate object_id '" + e.object_id + "' (first defined on line " +
                             std::to_string(it->second) + ")");
    }
    e.name = required_string(obj, "name", line_no);
    try {
      e.material_category = parse_material_category(required_string(obj, "material_category", line_no));
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::kValidation) throw;
      line_fail(line_no, err.what());
    }
    e.image_path = resolve(base_dir, required_string(obj, "image_path", line_no));

    const bool has_frames = obj.contains("tactile_frame_paths");
    const bool has_video = obj.contains("tactile_video_path");
    if (has_frames == has_video) {
      line_fail(line_no, "exactly one of 'tactile_frame_paths' and 'tactile_video_path' is required");
    }
    if (has_frames) {
      const auto& list = obj["tactile_frame_paths"];
      if (!list.is_array() || list.empty()) {
        line_fail(line_no, "'tactile_frame_paths' must be a non-empty array");
      }
      for (const auto& p : list) {
        if (!p.is_string()) line_fail(line_no, "'tactile_frame_paths' entries must be strings");
        e.tactile_frame_paths.push_back(resolve(base_dir, p.get<std::string>()));
      }
    } else {
      e.tactile_video_path = resolve(base_dir, required_string(obj, "tactile_video_path", line_no));
    }
    if (const auto it = obj.find("tactile_fps"); it != obj.end()) {
      if (!it->is_number() || !(it->get<double>() > 0.0)) {
        line_fail(line_no, "'tactile_fps' must be a positive number");
      }
      e.tactile_fps = it->get<double>();
    }

    const auto gt = obj.find("ground_truth");
    if (gt == obj.end()) line_fail(line_no, "missing field 'ground_truth'");
    if (!gt->is_object()) line_fail(line_no, "'ground_truth' must be an object");
    e.ground_truth.object_id = e.object_id;
    e.ground_truth.material_category = e.material_category;
    e.ground_truth.shore_hardness = required_number(*gt, "shore_hardness", line_no);
    e.ground_truth.elastic_modulus = required_number(*gt, "elastic_modulus", line_no);
    e.ground_truth.roughness_ra = required_number(*gt, "roughness_ra", line_no);

    if (check_files) {
      require_exists(e.image_path, line_no);
      for (const auto& p : e.tactile_frame_paths) require_exists(p, line_no);
      if (e.tactile_video_path) require_exists(*e.tactile_video_path, line_no);
    }
    entries.push_back(std::move(e));
  }
  if (entries.empty()) fail(ErrorKind::kValidation, "manifest has no entries");
  return entries;
}

std::vector<ManifestEntry> load_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kValidation, "cannot open manifest " + path.string());
  const std::string text(std::istreambuf_iterator<char>(in), {});
  return parse_manifest(text, path.parent_path());
}

std::vector<GroundTruthRecord> ground_truth_of(std::span<const ManifestEntry> entries) {
  std::vector<GroundTruthRecord> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.ground_truth);
  return out;
}

// ---------------------------------------------------------------------------
// Frame sampling

namespace {

std::vector<std::size_t> sample_timestamps(std::span<const std::int64_t> ts,
                                           std::int64_t stride_ms) {
  if (ts.empty()) fail(ErrorKind::kInput, "cannot sample an empty clip");
  if (stride_ms <= 0) fail(ErrorKind::kConfig, "stride_ms must be > 0");
  std::int64_t min_period = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = 1; i < ts.size(); ++i) min_period = std::min(min_period, ts[i] - ts[i - 1]);
  if (ts.size() > 1 && stride_ms < min_period) {
    fail(ErrorKind::kConfig, "stride " + std::to_string(stride_ms) +
                                 " ms is shorter than the frame period " +
                                 std::to_string(min_period) + " ms");
  }
  const std::int64_t t0 = ts.front();
  const std::int64_t span = ts.back() - t0;
  std::vector<std::size_t> keep;
  std::size_t i = 0;
  for (std::int64_t target = 0; target <= span; target += stride_ms) {
    while (i + 1 < ts.size() && ts[i + 1] - t0 <= target) ++i;
    if (keep.empty() || keep.back() != i) keep.push_back(i);
  }
  return keep;
}

}  // namespace

TactileClip sample_frames(const TactileClip& clip, std::int64_t stride_ms) {
  const auto keep = sample_timestamps(clip.timestamps_ms(), stride_ms);
  std::vector<Image> frames;
  std::vector<std::int64_t> ts;
  for (std::size_t i : keep) {
    frames.push_back(clip.frames()[i]);
    ts.push_back(clip.timestamps_ms()[i]);
  }
  return TactileClip(std::move(frames), std::move(ts), clip.sensor_id());
}

std::vector<std::size_t> sample_frame_indices(double fps, double duration_s,
                                              std::int64_t stride_ms) {
  if (!(fps > 0.0) || !(duration_s > 0.0)) {
    fail(ErrorKind::kConfig, "fps and duration must be > 0");
  }
  const auto count = static_cast<std::size_t>(std::llround(fps * duration_s));
  std::vector<std::int64_t> ts(count);
  for (std::size_t i = 0; i < count; ++i) {
    ts[i] = std::llround(static_cast<double>(i) * 1000.0 / fps);
  }
  return sample_timestamps(ts, stride_ms);
}

TactileClip load_tactile_clip(const ManifestEntry& entry) {
  std::vector<Image> frames;
  if (!entry.tactile_frame_paths.empty()) {
    for (const auto& p : entry.tactile_frame_paths) {
      auto images = read_netpbm_sequence(p);
      for (auto& img : images) frames.push_back(std::move(img));
    }
  } else if (entry.tactile_video_path) {
    const fs::path& p = *entry.tactile_video_path;
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& de : fs::directory_iterator(p)) {
        const auto ext = de.path().extension().string();
        if (de.is_regular_file() && (ext == ".pgm" || ext == ".ppm" || ext == ".pnm")) {
          files.push_back(de.path());
        }
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) frames.push_back(read_netpbm(f));
    } else {
      frames = read_netpbm_sequence(p);
    }
  }
  if (frames.empty()) fail(ErrorKind::kInput, "object '" + entry.object_id + "' has no tactile frames");
  return TactileClip::from_fps(std::move(frames), entry.tactile_fps, entry.object_id);
}

// ---------------------------------------------------------------------------
// Model space and backends

const std::map<std::string, std::vector<std::string>>& boundary_phrases() {
  static const std::map<std::string, std::vector<std::string>> kPhrases = {
      {"img_start", {"<image>", "image begins"}},
      {"img_end", {"</image>", "image ends"}},
      {"tact_start", {"<touch>", "tactile reading begins"}},
      {"tact_end", {"</touch>", "tactile reading ends"}},
  };
  return kPhrases;
}

Vector embed_phrase(std::string_view text, const Matrix& table) {
  if (text.empty()) fail(ErrorKind::kInput, "cannot embed an empty phrase");
  const EmbeddingSequence tokens = embed_tokens(tokenize_text(text), table);
  Vector mean(tokens.dim(), 0.0);
  for (std::size_t i = 0; i < tokens.length(); ++i) {
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += tokens[i][k];
  }
  for (double& v : mean) v /= static_cast<double>(tokens.length());
  return mean;
}

ModelSpace make_model_space(std::uint64_t seed, std::size_t dim) {
  Rng vision_rng(derive_seed(seed, "vision_tower"));
  Rng tactile_rng(derive_seed(seed, "tactile_tower"));
  EncoderTower vision = make_encoder_tower(vision_rng, dim);
  EncoderTower tactile = make_encoder_tower(tactile_rng, dim);
  ToyLmWeights lm = make_toy_lm_weights(seed, dim);
  std::map<std::string, std::vector<Vector>> phrase_embeddings;
  for (const auto& [name, phrases] : boundary_phrases()) {
    for (const auto& phrase : phrases) {
      phrase_embeddings[name].push_back(embed_phrase(phrase, lm.embedding));
    }
  }
  BoundaryTokens markers = init_boundary_tokens(phrase_embeddings);
  return ModelSpace{std::move(vision), std::move(tactile), std::move(lm), std::move(markers)};
}

std::unique_ptr<LanguageModel> make_backend(const RunConfig& config, const ModelSpace& space,
                                            Sleeper sleeper) {
  switch (config.backend.kind) {
    case BackendKind::kToy:
      return std::make_unique<ToyLm>(space.lm, config.seed);
    case BackendKind::kScripted:
      return std::make_unique<ScriptedBackend>(load_script(config.backend.script_path.string()));
    case BackendKind::kRemote: {
      RemoteEndpoint endpoint;
      endpoint.url = config.backend.url;
      endpoint.model = config.backend.model;
      endpoint.timeout_ms = config.backend.timeout_ms;
      return std::make_unique<RemoteBackend>(endpoint_with_env(endpoint), config.backend.retry,
                                             std::move(sleeper));
    }
  }
  fail(ErrorKind::kConfig, "unknown backend kind");
}

// ---------------------------------------------------------------------------
// Per-object inference

namespace {

std::string media_type(const Image& image) {
  return image.channels() == 1 ? "image/x-portable-graymap" : "image/x-portable-pixmap";
}

bool layout_uses_second_text(const Layout& layout) {
  return std::any_of(layout.begin(), layout.end(), [](const LayoutSegment& s) {
    return s.kind == SegmentKind::kText && s.text_part == 1;
  });
}

}  // namespace

GenerationRequest build_request(const ManifestEntry& entry, const RunConfig& config,
                                const ModelSpace& space, RequestKind kind,
                                const std::string& prompt) {
  const Image image = read_netpbm(entry.image_path);
  const TactileClip clip = sample_frames(load_tactile_clip(entry), config.stride_ms);

  const EmbeddingSequence vision =
      encode_vision(image, config.grid, space.vision.encoder, space.vision.projector);
  const EmbeddingSequence tactile =
      encode_tactile(clip, space.tactile.encoder, space.tactile.projector);
  std::vector<EmbeddingSequence> text_parts;
  if (layout_uses_second_text(config.layout)) {
    text_parts.push_back(embed_tokens(tokenize_text(prompt), space.lm.embedding));
    text_parts.push_back(embed_tokens(tokenize_text(kUserRequest), space.lm.embedding));
  } else {
    const std::string joined = prompt + "\n" + std::string(kUserRequest);
    text_parts.push_back(embed_tokens(tokenize_text(joined), space.lm.embedding));
  }
  MultimodalSequence sequence =
      assemble_sequence(text_parts, vision, tactile, space.markers, config.layout);

  GenerationRequest request;
  request.object_id = entry.object_id;
  request.max_tokens = config.backend.max_tokens;
  request.temperature = config.backend.temperature;
  switch (kind) {
    case RequestKind::kEmbeddings:
      request.sequence = std::move(sequence);
      break;
    case RequestKind::kMessages: {
      ChatMessage message;
      message.role = "user";
      message.parts.push_back(ChatPart::text_part(prompt));
      message.parts.push_back(
          ChatPart::image_part(base64_encode(encode_netpbm(image)), media_type(image)));
      for (const auto& frame : clip.frames()) {
        message.parts.push_back(
            ChatPart::image_part(base64_encode(encode_netpbm(frame)), media_type(frame)));
      }
      message.parts.push_back(ChatPart::text_part(std::string(kUserRequest)));
      request.messages.push_back(std::move(message));
      break;
    }
    case RequestKind::kObjectId:
      break;
  }
  return request;
}

ObjectOutcome infer_object(const ManifestEntry& entry, const RunConfig& config,
                           const ModelSpace& space, const LanguageModel& model) {
  ObjectOutcome out;
  out.object_id = entry.object_id;
  try {
    out.prompt = build_prompt(config.prompt,
                              config.name_hint ? std::optional<std::string>(entry.name)
                                               : std::nullopt);
    const GenerationRequest request =
        build_request(entry, config, space, model.input_kind(), out.prompt);
    const GenerationResult result = model.generate(request);
    out.generated = true;
    out.response = result.text;
    out.parsed = parse_response(result.text, config.effective_mode());
  } catch (const Error& e) {
    out.error_kind = e.kind();
    out.error = e.what();
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Orchestration

namespace {

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorKind::kIo, "failed writing " + path.string());
}

std::string scores_json(const ObjectOutcome& o) {
  ordered_json j;
  j["object_id"] = o.object_id;
  if (o.parsed) {
    const auto& s = o.parsed->scores;
    j["status"] = "ok";
    j["mode"] = std::string(to_string(o.parsed->mode));
    j["object"] = s.object_name;
    j["material"] = s.material;
    ordered_json scores;
    for (Property p : kAllProperties) {
      ordered_json entry;
      entry["score"] = s.score(p);
      const auto it = s.rationales.find(p);
      entry["rationale"] = it == s.rationales.end() ? std::string() : it->second;
      scores[std::string(to_string(p))] = std::move(entry);
    }
    j["scores"] = std::move(scores);
    j["warnings"] = o.parsed->warnings;
  } else {
    j["status"] = "error";
    j["error"] = o.error;
  }
  return j.dump(2) + "\n";
}

void persist_object(const fs::path& run_dir, const ObjectOutcome& o) {
  const fs::path dir = run_dir / o.object_id;
  fs::create_directories(dir);
  write_text(dir / "prompt.txt", o.prompt);
  write_text(dir / "response.txt", o.response);
  write_text(dir / "scores.json", scores_json(o));
}

CorrelationResult degenerate_result(Property property, std::size_t n) {
  CorrelationResult r;
  r.property = property;
  r.n = n;
  r.degenerate = true;
  r.t_approx_p = std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace

RunResult run_pipeline(std::span<const ManifestEntry> entries, const RunConfig& config,
                       const LanguageModel& model, const ModelSpace& space) {
  config.validate();
  if (space.markers.dim() != config.dim) {
    fail(ErrorKind::kConfig, "model space width differs from config dim");
  }
  RunResult run;
  if (config.persist) {
    run.run_dir = config.out_dir / config.run_id;
    fs::create_directories(run.run_dir);
  }

  run.outcomes.resize(entries.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr io_error;
  std::mutex io_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      run.outcomes[i] = infer_object(entries[i], config, space, model);
      if (!config.persist) continue;
      try {
        persist_object(run.run_dir, run.outcomes[i]);
      } catch (...) {
        std::lock_guard lock(io_mutex);
        if (!io_error) io_error = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(config.parallelism, entries.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (io_error) std::rethrow_exception(io_error);

  CorrelationReport& report = run.report;
  report.dataset_id = config.dataset_id;
  report.model_id = config.effective_model_id();

  ScoreTable table;
  std::size_t attempted = 0;
  std::size_t compliant = 0;
  for (const auto& o : run.outcomes) {
    if (o.generated) ++attempted;
    if (o.compliant()) ++compliant;
    if (o.parsed) {
      table.add(o.object_id, o.parsed->scores);
    } else {
      report.notes.push_back("skipped " + o.object_id + ": " + o.error);
    }
  }
  report.format_compliance =
      attempted == 0 ? 0.0 : static_cast<double>(compliant) / static_cast<double>(attempted);
  report.notes.push_back("effective n = " + std::to_string(table.size()) + " of " +
                         std::to_string(entries.size()) + " objects");

  const auto truth = ground_truth_of(entries);
  for (Property p : kAllProperties) {
    try {
      report.results.push_back(evaluate_property(table, truth, p, config.p_value));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kDegenerate) throw;
      report.results.push_back(degenerate_result(p, table.size()));
    }
  }

  if (config.persist) {
    write_text(run.run_dir / "report.txt", render_report(report, ReportFormat::kText));
    write_text(run.run_dir / "report.csv", render_report(report, ReportFormat::kCsv));
    write_text(run.run_dir / "report.json", render_report(report, ReportFormat::kJson));
  }
  return run;
}

RunResult run_pipeline(std::span<const ManifestEntry> entries, const RunConfig& config) {
  config.validate();
  const ModelSpace space = make_model_space(config.seed, config.dim);
  const auto model = make_backend(config, space);
  return run_pipeline(entries, config, *model, space);
}

}  // namespace vital
