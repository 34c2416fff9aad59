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

#include <cmath>
#include <limits>
#include <set>

#include "support/fixtures.hpp"
#include "vital/numerics.hpp"

namespace vital {
namespace {

using testing::throws_kind;

TEST(Matrix, ConstructionValidatesShapeAndValues) {
  EXPECT_TRUE(throws_kind(ErrorKind::kShape, [] { Matrix(2, 2, {1, 2, 3}); }));
  EXPECT_TRUE(throws_kind(ErrorKind::kInput, [] {
    Matrix(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()});
  }));
  const Matrix m(2, 3, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(m(1, 2), 6.0);
  EXPECT_EQ(m.at(0, 1), 2.0);
  EXPECT_TRUE(throws_kind(ErrorKind::kRange, [&] { (void)m.at(2, 0); }));
}

TEST(Matrix, AppendRowFixesColumns) {
  Matrix m;
  const double a[] = {1, 2};
  const double b[] = {3, 4, 5};
  m.append_row(a);
  m.append_row(a);
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 2u);
  EXPECT_TRUE(throws_kind(ErrorKind::kShape, [&] { m.append_row(b); }));
}

TEST(Matvec, MatchesNaiveLoop) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t r = 1 + rng.uniform_index(7);
    const std::size_t c = 1 + rng.uniform_index(7);
    Matrix w = seeded_init(rng, r, c, 1.0);
    Vector x(c);
    for (double& v : x) v = rng.uniform(-2, 2);
    const Vector y = matvec(w, x);
    for (std::size_t i = 0; i < r; ++i) {
      long double acc = 0;
      for (std::size_t k = 0; k < c; ++k) acc += static_cast<long double>(w(i, k)) * x[k];
      EXPECT_NEAR(y[i], static_cast<double>(acc), 1e-12);
    }
  }
  EXPECT_TRUE(throws_kind(ErrorKind::kShape, [] {
    const Vector x = {1.0};
    (void)matvec(Matrix(2, 2), x);
  }));
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    EXPECT_EQ(va, b.next_u64());
    differs = differs || va != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, RangesAndIndexCoverage) {
  Rng rng(5);
  std::vector<int> counts(6, 0);
  for (int i = 0; i < 60000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = rng.uniform(-3.0, 2.0);
    ASSERT_GE(v, -3.0);
    ASSERT_LE(v, 2.0);
    ++counts[rng.uniform_index(6)];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(DeriveSeed, StableAndTagSensitive) {
  EXPECT_EQ(derive_seed(1, "hardness"), derive_seed(1, "hardness"));
  std::set<std::uint64_t> seen;
  for (auto tag : {"hardness", "elasticity", "roughness", "toy_lm"}) {
    seen.insert(derive_seed(1, tag));
    seen.insert(derive_seed(2, tag));
  }
  EXPECT_EQ(seen.size(), 8u);
}

TEST(SeededInit, RespectsScale) {
  Rng rng(9);
  const Matrix m = seeded_init(rng, 10, 10, 0.25);
  for (double v : m.data()) {
    EXPECT_LE(std::abs(v), 0.25);
  }
  EXPECT_TRUE(throws_kind(ErrorKind::kConfig, [&] { (void)seeded_init(rng, 2, 2, 0.0); }));
}

TEST(Mlp, ForwardMatchesHandComputation) {
  // [2] -> relu [2] -> identity [1]
  DenseLayer l1{Matrix(2, 2, {1.0, -1.0, 0.5, 2.0}), {0.0, -1.0}, Activation::kRelu};
  DenseLayer l2{Matrix(1, 2, {3.0, -2.0}), {0.5}, Activation::kIdentity};
  const MlpParams mlp({l1, l2});
  // x = [1, 2]: z1 = [1 - 2, 0.5 + 4 - 1] = [-1, 3.5] -> relu [0, 3.5]
  // y = 3*0 - 2*3.5 + 0.5 = -6.5
  const Vector x = {1.0, 2.0};
  const Vector y = mlp_forward(mlp, x);
  ASSERT_EQ(y.size(), 1u);
  EXPECT_DOUBLE_EQ(y[0], -6.5);
  EXPECT_EQ(mlp.in_dim(), 2u);
  EXPECT_EQ(mlp.out_dim(), 1u);
}

TEST(Mlp, RejectsBrokenChains) {
  DenseLayer l1{Matrix(3, 2), Vector(3, 0.0), Activation::kRelu};
  DenseLayer l2{Matrix(1, 2), Vector(1, 0.0), Activation::kIdentity};
  EXPECT_TRUE(throws_kind(ErrorKind::kShape, [&] { MlpParams({l1, l2}); }));
  DenseLayer bad_bias{Matrix(3, 2), Vector(2, 0.0), Activation::kRelu};
  EXPECT_TRUE(throws_kind(ErrorKind::kShape, [&] { MlpParams({bad_bias}); }));
}

TEST(Mlp, DirectionalDerivativeOfLinearMapIsTheMap) {
  Rng rng(11);
  const std::size_t dims[] = {4, 3};
  const MlpParams mlp = random_mlp(rng, dims, Activation::kIdentity, Activation::kIdentity);
  const Vector x = {0.3, -0.1, 0.7, 0.2};
  const Vector v = {1.0, 0.0, -1.0, 2.0};
  const Vector jv = mlp_directional_derivative(mlp, x, v);
  const Vector wv = matvec(mlp.layers()[0].weight, v);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(jv[i], wv[i], 1e-15);
}

TEST(Softmax, KnownLogits) {
  const Matrix m(1, 3, {std::log(1.0), std::log(2.0), std::log(3.0)});
  const Matrix s = softmax_rows(m);
  EXPECT_NEAR(s(0, 0), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(s(0, 1), 2.0 / 6.0, 1e-15);
  EXPECT_NEAR(s(0, 2), 3.0 / 6.0, 1e-15);
}

TEST(Softmax, LargeLogitsStayFinite) {
  const Matrix m(2, 3, {1000.0, 1000.0, 1000.0, -1000.0, 0.0, 1000.0});
  const Matrix s = softmax_rows(m);
  EXPECT_TRUE(s.all_finite());
  EXPECT_NEAR(s(0, 0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(s(1, 2), 1.0, 1e-15);
  EXPECT_TRUE(throws_kind(ErrorKind::kShape, [] { (void)softmax_rows(Matrix()); }));
}

TEST(PositionalEncoding, KnownValues) {
  const Matrix pe = sinusoidal_pe(3, 4);
  EXPECT_EQ(pe(0, 0), 0.0);
  EXPECT_EQ(pe(0, 1), 1.0);
  EXPECT_EQ(pe(0, 2), 0.0);
  EXPECT_EQ(pe(0, 3), 1.0);
  EXPECT_NEAR(pe(1, 0), 0.841471, 1e-5);
  EXPECT_NEAR(pe(1, 1), 0.540302, 1e-5);
  EXPECT_NEAR(pe(1, 2), 0.010000, 1e-5);
  EXPECT_NEAR(pe(1, 3), 0.999950, 1e-5);
  // Independent formula for pos 2.
  for (std::size_t i = 0; i < 2; ++i) {
    const double freq = std::pow(10000.0, -2.0 * static_cast<double>(i) / 4.0);
    EXPECT_NEAR(pe(2, 2 * i), std::sin(2.0 * freq), 1e-15);
    EXPECT_NEAR(pe(2, 2 * i + 1), std::cos(2.0 * freq), 1e-15);
  }
}

TEST(PositionalEncoding, BoundsAndErrors) {
  const Matrix pe = sinusoidal_pe(200, 64);
  for (double v : pe.data()) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_TRUE(throws_kind(ErrorKind::kConfig, [] { (void)sinusoidal_pe(4, 3); }));
  EXPECT_TRUE(throws_kind(ErrorKind::kConfig, [] { (void)sinusoidal_pe(4, 0); }));
  EXPECT_TRUE(throws_kind(ErrorKind::kConfig, [] { (void)sinusoidal_pe(0, 4); }));
}

TEST(FiniteDiff, IdentityMlpsAgree) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const std::size_t dims[] = {6, 9, 4};
    const MlpParams mlp = random_mlp(rng, dims, Activation::kIdentity, Activation::kIdentity, 0.5);
    Vector x(6), v(6);
    for (auto& e : x) e = rng.uniform(-1, 1);
    for (auto& e : v) e = rng.uniform(-1, 1);
    EXPECT_LT(finite_diff_check(mlp, x, v, 1e-5), 1e-5);
  }
}

TEST(FiniteDiff, RejectsDegenerateSettings) {
  Rng rng(1);
  const std::size_t dims[] = {2, 2};
  const MlpParams mlp = random_mlp(rng, dims);
  const Vector x = {0.1, 0.2};
  const Vector zero = {0.0, 0.0};
  EXPECT_TRUE(throws_kind(ErrorKind::kConfig, [&] { (void)finite_diff_check(mlp, x, x, 0.0); }));
  EXPECT_TRUE(throws_kind(ErrorKind::kConfig, [&] { (void)finite_diff_check(mlp, x, zero, 1e-5); }));
}

}  // namespace
}  // namespace vital
