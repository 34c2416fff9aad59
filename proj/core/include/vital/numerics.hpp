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

// Dense numeric substrate: row-major matrices, small MLPs, softmax,
// sinusoidal positional encodings, seeded initialization and a
// directional-derivative gradient checker. Everything is double precision.

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace vital {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  /// Throws kShape when data.size() != rows * cols and kInput on NaN/Inf.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) noexcept {
    return data_[r * cols_ + c];
  }
  /// Bounds-checked element access.
  double at(std::size_t r, std::size_t c) const;

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  /// Appends one row; the first append on a 0x0 matrix fixes the column count.
  void append_row(std::span<const double> values);

  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// y = W x. Throws kShape when x.size() != W.cols().
Vector matvec(const Matrix& w, std::span<const double> x);

/// Seeded 64-bit generator. The engine (mt19937_64) and the conversions below
/// are fully specified, so a seed yields the same draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01();
  /// Uniform in [lo, hi].
  double uniform(double lo, double hi);
  /// Unbiased uniform integer in [0, n). n must be > 0.
  std::size_t uniform_index(std::size_t n);

  Rng(const Rng&) = delete;
  Rng& operator=(const Rng&) = delete;
  Rng(Rng&&) = default;
  Rng& operator=(Rng&&) = default;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Mixes a base seed with a tag (splitmix64 over FNV-1a) so independent
/// consumers get decorrelated streams from one user-facing seed.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);

enum class Activation { kRelu, kIdentity };

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
  Activation activation = Activation::kIdentity;
};

class MlpParams {
 public:
  MlpParams() = default;
  /// Validates that biases match weight rows and adjacent layers chain.
  explicit MlpParams(std::vector<DenseLayer> layers);

  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::size_t in_dim() const;
  std::size_t out_dim() const;
  bool empty() const noexcept { return layers_.empty(); }

 private:
  std::vector<DenseLayer> layers_;
};

constexpr double kDefaultInitScale = 0.08;

/// Matrix with entries uniform in [-scale, +scale]. Throws kConfig for scale <= 0.
Matrix seeded_init(Rng& rng, std::size_t rows, std::size_t cols,
                   double scale = kDefaultInitScale);

/// MLP with the given layer widths (dims.size() >= 2). Hidden layers use
/// `hidden`, the last layer `output`; weights and biases via seeded_init.
MlpParams random_mlp(Rng& rng, std::span<const std::size_t> dims,
                     Activation hidden = Activation::kRelu,
                     Activation output = Activation::kIdentity,
                     double scale = kDefaultInitScale);

Vector mlp_forward(const MlpParams& params, std::span<const double> input);

/// Forward-mode directional derivative J(input) * direction.
Vector mlp_directional_derivative(const MlpParams& params,
                                  std::span<const double> input,
                                  std::span<const double> direction);

/// Row-wise softmax with row-max subtraction. Throws kShape on empty input.
Matrix softmax_rows(const Matrix& m);
/// In-place softmax of one row.
void softmax_inplace(std::span<double> row);

/// P x d table: (pos, 2i) = sin(pos / 10000^(2i/d)), (pos, 2i+1) = cos(...).
/// Throws kConfig for odd d, d == 0 or P == 0.
Matrix sinusoidal_pe(std::size_t positions, std::size_t dim);

/// Relative error between the analytic directional derivative and the
/// central difference (f(x + h v) - f(x - h v)) / 2h, measured in L2 norm:
/// |analytic - numeric| / (|numeric| + 1e-12).
double finite_diff_check(const MlpParams& params, std::span<const double> input,
                         std::span<const double> direction, double h);

}  // namespace vital
