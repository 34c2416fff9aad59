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

#include <algorithm>
#include <cmath>

#include "vital/assembly.hpp"
#include "vital/evaluation.hpp"
#include "vital/pipeline.hpp"

namespace vital {
namespace {

// Never constant: a constant series has no defined rank correlation.
Vector random_series(Rng& rng, std::size_t n, bool with_ties) {
  Vector v(n);
  do {
    for (auto& x : v) x = with_ties ? static_cast<double>(rng.uniform_index(4)) : rng.uniform(-5, 5);
  } while (std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; }));
  return v;
}

// Strictly increasing maps applied to one side must leave rho unchanged.
TEST(Properties, SpearmanInvariantUnderMonotoneMaps) {
  Rng rng(20260101);
  const std::array<double (*)(double), 3> maps = {
      [](double x) { return std::exp(x); }, [](double x) { return x * x * x + 2 * x; },
      [](double x) { return 3.5 * x - 7.0; }};
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 3 + rng.uniform_index(10);
    const bool ties = trial % 3 == 0;
    const Vector x = random_series(rng, n, ties);
    const Vector y = random_series(rng, n, !ties);
    const double rho = spearman_rho(x, y);
    for (auto f : maps) {
      Vector fx(x);
      std::transform(fx.begin(), fx.end(), fx.begin(), f);
      EXPECT_EQ(spearman_rho(fx, y), rho);
    }
    EXPECT_EQ(spearman_rho(min_max_normalize(x), min_max_normalize(y)), rho);
    EXPECT_EQ(spearman_rho(y, x), rho);
    EXPECT_GE(rho, -1.0);
    EXPECT_LE(rho, 1.0);
    Vector neg(x);
    for (auto& v : neg) v = -v;
    EXPECT_NEAR(spearman_rho(neg, y), -rho, 1e-12);
  }
}

TEST(Properties, PValueIsAProbabilityAndSymmetric) {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng.uniform_index(5);
    const Vector x = random_series(rng, n, trial % 2 == 0);
    const Vector y = random_series(rng, n, false);
    const double p = permutation_p_value(x, y).value;
    EXPECT_GT(p, 0.0);
    EXPECT_LE(p, 1.0);
    EXPECT_DOUBLE_EQ(permutation_p_value(y, x).value, p);
  }
}

TEST(Properties, AssembledLengthIsAdditive) {
  const ModelSpace space = make_model_space(3, 8);
  Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t t0 = rng.uniform_index(65);
    const std::size_t t1 = rng.uniform_index(65);
    const std::size_t nv = 1 + rng.uniform_index(64);
    const std::size_t nt = 1 + rng.uniform_index(64);
    auto filled = [&](Modality m, std::size_t len) {
      EmbeddingSequence s(m, 8);
      for (std::size_t i = 0; i < len; ++i) s.append(Vector(8, static_cast<double>(i)));
      return s;
    };
    const std::vector<EmbeddingSequence> text = {filled(Modality::kText, t0),
                                                 filled(Modality::kText, t1)};
    const auto seq = assemble_sequence(text, filled(Modality::kVision, nv),
                                       filled(Modality::kTactile, nt), space.markers,
                                       default_layout());
    ASSERT_EQ(seq.length(), t0 + t1 + nv + nt + 4);
    EXPECT_TRUE(has_valid_spans(seq.tags()));
    const auto [vb, ve] = seq.span_of(ItemTag::kVision);
    EXPECT_EQ(vb, t0 + 1);
    EXPECT_EQ(ve - vb, nv);
    const auto [tb, te] = seq.span_of(ItemTag::kTactile);
    EXPECT_EQ(tb, ve + 2);
    EXPECT_EQ(te - tb, nt);
  }
}

}  // namespace
}  // namespace vital
