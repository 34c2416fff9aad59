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

// Manifest ingestion, tactile frame sampling, run configuration and the
// manifest-to-report orchestration.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vital/assembly.hpp"
#include "vital/backend.hpp"
#include "vital/encoders.hpp"
#include "vital/error.hpp"
#include "vital/evaluation.hpp"
#include "vital/prompting.hpp"
#include "vital/remote_client.hpp"
#include "vital/toy_lm.hpp"

namespace vital {

inline constexpr double kDefaultTactileFps = 20.0;
inline constexpr std::int64_t kDefaultStrideMs = 250;

struct ManifestEntry {
  std::string object_id;
  std::string name;
  MaterialCategory material_category = MaterialCategory::kPlastic;
  std::filesystem::path image_path;
  std::vector<std::filesystem::path> tactile_frame_paths;
  /// A directory of frames (sorted by file name) or one multi-image file.
  std::optional<std::filesystem::path> tactile_video_path;
  double tactile_fps = kDefaultTactileFps;
  GroundTruthRecord ground_truth;
  std::size_t line = 0;
};

/// One JSON object per line; blank lines and lines starting with '#' are
/// skipped. Relative paths resolve against base_dir. Errors are kValidation
/// and name the line.
std::vector<ManifestEntry> parse_manifest(std::string_view text,
                                          const std::filesystem::path& base_dir,
                                          bool check_files = true);
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

std::vector<GroundTruthRecord> ground_truth_of(std::span<const ManifestEntry> entries);

/// Keeps the frame at or immediately before each target time 0, stride,
/// 2*stride, ... (relative to the first timestamp). kInput for an empty clip,
/// kConfig when stride_ms is not positive or is shorter than the smallest
/// frame period.
TactileClip sample_frames(const TactileClip& clip, std::int64_t stride_ms);

/// Frame indices sample_frames keeps for a clip of fps * duration_s frames.
std::vector<std::size_t> sample_frame_indices(double fps, double duration_s,
                                              std::int64_t stride_ms);

/// Reads all tactile frames of an entry (unsampled).
TactileClip load_tactile_clip(const ManifestEntry& entry);

enum class BackendKind { kToy, kScripted, kRemote };

std::string_view to_string(BackendKind kind);
BackendKind parse_backend_kind(std::string_view name);

struct BackendConfig {
  BackendKind kind = BackendKind::kToy;
  std::string model;
  std::string url;  // remote; empty means VITAL_REMOTE_URL
  std::filesystem::path script_path;
  int max_tokens = 256;
  double temperature = 0.0;
  std::int64_t timeout_ms = 60000;
  RetryPolicy retry;
};

struct RunConfig {
  BackendConfig backend;
  std::uint64_t seed = 0;
  std::size_t dim = kDefaultDim;
  std::size_t grid = kDefaultGrid;
  std::int64_t stride_ms = kDefaultStrideMs;
  PromptSpec prompt = default_prompt_spec();
  /// Pass the manifest name to the prompt as the operator hint.
  bool name_hint = false;
  Layout layout = default_layout();
  std::size_t parallelism = 1;
  /// Unset: lenient for remote backends, strict otherwise.
  std::optional<ParseMode> mode;
  std::filesystem::path out_dir = "out";
  std::string run_id = "run";
  std::string dataset_id = "dataset";
  std::string model_id;  // empty: derived from the backend
  PValueOptions p_value;
  bool persist = true;

  /// Throws kConfig for out-of-range settings.
  void validate() const;
  ParseMode effective_mode() const;
  std::string effective_model_id() const;
};

/// JSON document; every field optional. Relative paths resolve against
/// base_dir. "prompt" may be an inline object or a path to one.
RunConfig parse_run_config(std::string_view json, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

PromptSpec parse_prompt_spec(std::string_view json);

/// The second text part of every assembled sequence.
inline constexpr std::string_view kUserRequest =
    "Estimate the hardness, elasticity and roughness of the object shown.";

/// Seeded encoders, decoder weights and boundary tokens sharing one width.
struct ModelSpace {
  EncoderTower vision;
  EncoderTower tactile;
  ToyLmWeights lm;
  BoundaryTokens markers;
};

/// Phrases whose mean token embedding initializes each boundary token.
const std::map<std::string, std::vector<std::string>>& boundary_phrases();

/// Mean of the rows of table selected by the bytes of text.
Vector embed_phrase(std::string_view text, const Matrix& table);

ModelSpace make_model_space(std::uint64_t seed, std::size_t dim);

std::unique_ptr<LanguageModel> make_backend(const RunConfig& config, const ModelSpace& space,
                                            Sleeper sleeper = real_sleeper());

struct ObjectOutcome {
  std::string object_id;
  std::string prompt;
  std::string response;
  bool generated = false;
  std::optional<ParsedResponse> parsed;
  std::optional<ErrorKind> error_kind;
  std::string error;

  bool compliant() const { return parsed && parsed->warnings.empty(); }
};

/// The request the backend receives for one object.
GenerationRequest build_request(const ManifestEntry& entry, const RunConfig& config,
                                const ModelSpace& space, RequestKind kind,
                                const std::string& prompt);

/// Never throws for per-object problems; they land in error/error_kind.
ObjectOutcome infer_object(const ManifestEntry& entry, const RunConfig& config,
                           const ModelSpace& space, const LanguageModel& model);

struct RunResult {
  CorrelationReport report;
  std::vector<ObjectOutcome> outcomes;  // manifest order
  std::filesystem::path run_dir;        // empty when not persisted
};

/// Writes out/<run_id>/<object_id>/{prompt.txt,response.txt,scores.json} and
/// out/<run_id>/report.{txt,csv,json} when config.persist. Throws
/// kInsufficientData when fewer than 3 objects parse and join.
RunResult run_pipeline(std::span<const ManifestEntry> entries, const RunConfig& config,
                       const LanguageModel& model, const ModelSpace& space);
RunResult run_pipeline(std::span<const ManifestEntry> entries, const RunConfig& config);

}  // namespace vital
