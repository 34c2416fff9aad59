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

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "vital/evaluation.hpp"
#include "vital/numerics.hpp"
#include "vital/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitValidation = 2;
constexpr int kExitBackend = 3;
constexpr int kExitInsufficient = 4;

int exit_code_for(vital::ErrorKind kind) {
  using vital::ErrorKind;
  switch (kind) {
    case ErrorKind::kProtocol:
    case ErrorKind::kExhausted:
    case ErrorKind::kDecode:
    case ErrorKind::kFixture:
      return kExitBackend;
    case ErrorKind::kInsufficientData:
      return kExitInsufficient;
    case ErrorKind::kDegenerate:
      return kExitOther;
    default:
      return kExitValidation;
  }
}

struct Overrides {
  std::string config_path;
  std::optional<std::string> backend;
  std::optional<std::string> script;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid;
  std::optional<std::size_t> dim;
  std::optional<std::int64_t> stride_ms;
  std::optional<std::string> mode;
  std::optional<std::string> out;
  std::optional<std::string> run_id;
  std::optional<std::size_t> parallelism;
};

void add_run_flags(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--config", o.config_path, "Run configuration (JSON)");
  cmd.add_option("--backend", o.backend, "toy, scripted or remote")
      ->check(CLI::IsMember({"toy", "scripted", "remote"}));
  cmd.add_option("--script", o.script, "Canned responses for the scripted backend (JSON)");
  cmd.add_option("--seed", o.seed, "Seed for encoders, decoder and Monte-Carlo p-values");
  cmd.add_option("--grid", o.grid, "Vision grid size G");
  cmd.add_option("--dim", o.dim, "Shared embedding width d");
  cmd.add_option("--stride-ms", o.stride_ms, "Tactile frame sampling stride");
  cmd.add_option("--mode", o.mode, "Response parsing mode")
      ->check(CLI::IsMember({"strict", "lenient"}));
  cmd.add_option("--out", o.out, "Output root directory");
  cmd.add_option("--run-id", o.run_id, "Run directory name under --out");
  cmd.add_option("--parallelism", o.parallelism, "Concurrent objects");
}

vital::RunConfig resolve_config(const Overrides& o) {
  vital::RunConfig c;
  if (!o.config_path.empty()) c = vital::load_run_config(o.config_path);
  if (o.backend) c.backend.kind = vital::parse_backend_kind(*o.backend);
  if (o.script) c.backend.script_path = *o.script;
  if (o.seed) {
    c.seed = *o.seed;
    c.p_value.seed = *o.seed;
  }
  if (o.grid) c.grid = *o.grid;
  if (o.dim) c.dim = *o.dim;
  if (o.stride_ms) c.stride_ms = *o.stride_ms;
  if (o.mode) c.mode = vital::parse_mode(*o.mode);
  if (o.out) c.out_dir = *o.out;
  if (o.run_id) c.run_id = *o.run_id;
  if (o.parallelism) c.parallelism = *o.parallelism;
  c.validate();
  return c;
}

const vital::ManifestEntry& find_entry(const std::vector<vital::ManifestEntry>& entries,
                                       const std::string& id) {
  for (const auto& e : entries) {
    if (e.object_id == id) return e;
  }
  vital::fail(vital::ErrorKind::kValidation, "object '" + id + "' is not in the manifest");
}

int cmd_ingest(const std::string& manifest, const Overrides& o) {
  const auto config = resolve_config(o);
  const auto entries = vital::load_manifest(manifest);
  for (const auto& e : entries) {
    const auto clip = vital::load_tactile_clip(e);
    const auto sampled = vital::sample_frames(clip, config.stride_ms);
    const auto image = vital::read_netpbm(e.image_path);
    std::printf("%s\t%s\t%s\timage %zux%zu\tframes %zu -> %zu\n", e.object_id.c_str(),
                e.name.c_str(), std::string(vital::to_string(e.material_category)).c_str(),
                image.width(), image.height(), clip.size(), sampled.size());
  }
  std::printf("%zu objects ok\n", entries.size());
  return kExitOk;
}

int cmd_prompt(const std::string& manifest, const std::string& object, const Overrides& o) {
  const auto config = resolve_config(o);
  std::optional<std::string> hint;
  if (!manifest.empty() && !object.empty()) {
    const auto entries = vital::load_manifest(manifest);
    const auto& entry = find_entry(entries, object);
    if (config.name_hint) hint = entry.name;
  }
  std::cout << vital::build_prompt(config.prompt, hint);
  return kExitOk;
}

int cmd_infer(const std::string& manifest, const std::string& object, const Overrides& o) {
  const auto config = resolve_config(o);
  const auto entries = vital::load_manifest(manifest);
  const auto& entry = find_entry(entries, object);
  const auto space = vital::make_model_space(config.seed, config.dim);
  const auto model = vital::make_backend(config, space);
  const auto outcome = vital::infer_object(entry, config, space, *model);
  if (outcome.generated) std::cout << outcome.response << (outcome.response.ends_with('\n') ? "" : "\n");
  if (!outcome.parsed) {
    std::cerr << "vital: " << outcome.error << "\n";
    return outcome.error_kind ? exit_code_for(*outcome.error_kind) : kExitOther;
  }
  nlohmann::ordered_json j;
  j["object_id"] = outcome.object_id;
  for (auto p : vital::kAllProperties) {
    j[std::string(vital::to_string(p))] = outcome.parsed->scores.score(p);
  }
  j["warnings"] = outcome.parsed->warnings;
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& manifest, const std::string& format, const Overrides& o) {
  const auto config = resolve_config(o);
  const auto entries = vital::load_manifest(manifest);
  const auto run = vital::run_pipeline(entries, config);
  std::cout << vital::render_report(run.report, vital::parse_report_format(format));
  if (!run.run_dir.empty()) std::cerr << "artifacts: " << run.run_dir.string() << "\n";
  return kExitOk;
}

int check(bool ok, const char* name) {
  std::printf("%s %s\n", ok ? "PASS" : "FAIL", name);
  return ok ? 0 : 1;
}

int cmd_selftest() {
  using namespace vital;
  int failures = 0;

  const Matrix pe = sinusoidal_pe(2, 4);
  const double expected[4] = {0.841471, 0.540302, 0.010000, 0.999950};
  bool pe_ok = pe(0, 0) == 0.0 && pe(0, 1) == 1.0 && pe(0, 2) == 0.0 && pe(0, 3) == 1.0;
  for (int k = 0; k < 4; ++k) pe_ok = pe_ok && std::abs(pe(1, k) - expected[k]) < 1e-5;
  failures += check(pe_ok, "positional encoding");

  Matrix logits(1, 3, {std::log(1.0), std::log(2.0), std::log(3.0)});
  const Matrix sm = softmax_rows(logits);
  failures += check(std::abs(sm(0, 0) - 1.0 / 6) < 1e-12 && std::abs(sm(0, 2) - 0.5) < 1e-12,
                    "softmax");

  Rng rng(7);
  const std::size_t dims[] = {5, 8, 3};
  const auto mlp = random_mlp(rng, dims, Activation::kIdentity, Activation::kIdentity);
  const Vector x = {0.1, -0.2, 0.3, 0.4, -0.5};
  const Vector v = {1.0, 0.5, -0.25, 0.0, 2.0};
  failures += check(finite_diff_check(mlp, x, v, 1e-5) < 1e-5, "finite-difference gradient");

  const double a[] = {1, 2, 3, 4, 5};
  const double b[] = {2, 1, 4, 3, 5};
  failures += check(std::abs(spearman_rho(a, b) - 0.8) < 1e-12, "spearman closed form");
  const double t1[] = {1, 2, 2, 4};
  const double t2[] = {1, 2, 3, 4};
  failures += check(std::abs(spearman_rho(t1, t2) - 0.948683) < 1e-6, "spearman with ties");
  PValueOptions exact;
  exact.method = PValueMethod::kExact;
  const double i3[] = {1, 2, 3};
  const double i4[] = {1, 2, 3, 4};
  failures += check(std::abs(permutation_p_value(i3, i3, exact).value - 1.0 / 3) < 1e-15 &&
                        std::abs(permutation_p_value(i4, i4, exact).value - 1.0 / 12) < 1e-15,
                    "exact permutation p");
  const auto idx = sample_frame_indices(20.0, 6.0, 250);
  failures += check(idx.size() == 24 && idx.front() == 0 && idx.back() == 115, "frame sampling");
  return failures == 0 ? kExitOk : kExitOther;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vital: visuo-tactile physical property estimation"};
  app.require_subcommand(1);

  std::string manifest;
  std::string object;
  std::string format = "text";
  Overrides ingest_o, prompt_o, infer_o, eval_o;

  auto* ingest = app.add_subcommand("ingest", "Validate a manifest and sample tactile frames");
  ingest->add_option("--manifest", manifest, "Object manifest (JSON lines)")->required();
  add_run_flags(*ingest, ingest_o);

  auto* prompt = app.add_subcommand("prompt", "Print the rendered prompt");
  prompt->add_option("--manifest", manifest, "Object manifest (JSON lines)");
  prompt->add_option("--object", object, "Object id for the name hint");
  add_run_flags(*prompt, prompt_o);

  auto* infer = app.add_subcommand("infer", "Run one object end to end");
  infer->add_option("--manifest", manifest, "Object manifest (JSON lines)")->required();
  infer->add_option("--object", object, "Object id")->required();
  add_run_flags(*infer, infer_o);

  auto* eval = app.add_subcommand("eval", "Run all objects and print the correlation report");
  eval->add_option("--manifest", manifest, "Object manifest (JSON lines)")->required();
  eval->add_option("--format", format, "text, csv or json")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  add_run_flags(*eval, eval_o);

  auto* selftest = app.add_subcommand("selftest", "Run the numerics oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*ingest) return cmd_ingest(manifest, ingest_o);
    if (*prompt) return cmd_prompt(manifest, object, prompt_o);
    if (*infer) return cmd_infer(manifest, object, infer_o);
    if (*eval) return cmd_eval(manifest, format, eval_o);
    if (*selftest) return cmd_selftest();
  } catch (const vital::Error& e) {
    std::cerr << "vital: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "vital: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}
