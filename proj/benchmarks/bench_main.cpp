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

#include <benchmark/benchmark.h>

#include <numeric>

#include "vital/encoders.hpp"
#include "vital/evaluation.hpp"
#include "vital/pipeline.hpp"

namespace {

using namespace vital;

Vector random_vector(Rng& rng, std::size_t n) {
  Vector v(n);
  for (auto& x : v) x = rng.uniform(0, 1);
  return v;
}

void BM_SpearmanRho(benchmark::State& state) {
  Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Vector x = random_vector(rng, n), y = random_vector(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(spearman_rho(x, y));
}
BENCHMARK(BM_SpearmanRho)->Arg(35)->Arg(1000);

void BM_ExactPValue(benchmark::State& state) {
  Rng rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Vector x = random_vector(rng, n), y = random_vector(rng, n);
  PValueOptions opts;
  opts.method = PValueMethod::kExact;
  for (auto _ : state) benchmark::DoNotOptimize(permutation_p_value(x, y, opts).value);
}
BENCHMARK(BM_ExactPValue)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_MonteCarloPValue(benchmark::State& state) {
  Rng rng(3);
  const Vector x = random_vector(rng, 35), y = random_vector(rng, 35);
  PValueOptions opts;
  opts.method = PValueMethod::kMonteCarlo;
  opts.resamples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(permutation_p_value(x, y, opts).value);
}
BENCHMARK(BM_MonteCarloPValue)->Arg(10000)->Unit(benchmark::kMillisecond);

Image noise_image(Rng& rng, std::size_t w, std::size_t h, std::size_t ch) {
  return Image(w, h, ch, random_vector(rng, w * h * ch));
}

void BM_EncodeVision(benchmark::State& state) {
  Rng rng(4);
  const ModelSpace space = make_model_space(4, 64);
  const Image image = noise_image(rng, 224, 224, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        encode_vision(image, 4, space.vision.encoder, space.vision.projector).length());
  }
}
BENCHMARK(BM_EncodeVision)->Unit(benchmark::kMillisecond);

void BM_EncodeTactile(benchmark::State& state) {
  Rng rng(5);
  const ModelSpace space = make_model_space(5, 64);
  std::vector<Image> frames;
  for (int i = 0; i < 24; ++i) frames.push_back(noise_image(rng, 64, 64, 1));
  const auto clip = TactileClip::from_fps(frames, 20.0, "bench");
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        encode_tactile(clip, space.tactile.encoder, space.tactile.projector).length());
  }
}
BENCHMARK(BM_EncodeTactile)->Unit(benchmark::kMillisecond);

void BM_ToyLmInfer(benchmark::State& state) {
  Rng rng(6);
  RunConfig config;
  config.dim = static_cast<std::size_t>(state.range(0));
  const ModelSpace space = make_model_space(config.seed, config.dim);
  const auto model = make_backend(config, space);
  std::vector<Image> frames;
  for (int i = 0; i < 12; ++i) frames.push_back(noise_image(rng, 16, 16, 1));
  const auto clip = TactileClip::from_fps(frames, 20.0, "bench");
  const Image image = noise_image(rng, 32, 24, 3);
  const auto vision = encode_vision(image, config.grid, space.vision.encoder, space.vision.projector);
  const auto tactile = encode_tactile(clip, space.tactile.encoder, space.tactile.projector);
  GenerationRequest request;
  request.object_id = "bench";
  EmbeddingSequence text(Modality::kText, config.dim);
  for (std::size_t i = 0; i < 32; ++i) text.append(Vector(config.dim, 0.01 * static_cast<double>(i)));
  const std::vector<EmbeddingSequence> parts = {text};
  request.sequence = assemble_sequence(parts, vision, tactile, space.markers, prepend_layout());
  for (auto _ : state) benchmark::DoNotOptimize(model->generate(request).text.size());
}
BENCHMARK(BM_ToyLmInfer)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
