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

#include "vital/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vital/error.hpp"

namespace vital {
namespace {

std::string dims(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

double l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    fail(ErrorKind::kShape, "matrix " + dims(rows_, cols_) + " given " +
                                std::to_string(data_.size()) + " values");
  }
  if (!all_finite()) fail(ErrorKind::kInput, "matrix contains NaN or Inf");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Matrix::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) {
    fail(ErrorKind::kRange, "index (" + std::to_string(r) + "," +
                                std::to_string(c) + ") outside " +
                                dims(rows_, cols_));
  }
  return (*this)(r, c);
}

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    fail(ErrorKind::kShape, "row of length " + std::to_string(values.size()) +
                                " appended to matrix with " +
                                std::to_string(cols_) + " columns");
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

Vector matvec(const Matrix& w, std::span<const double> x) {
  if (x.size() != w.cols()) {
    fail(ErrorKind::kShape, "matvec " + dims(w.rows(), w.cols()) +
                                " with vector of length " +
                                std::to_string(x.size()));
  }
  Vector y(w.rows(), 0.0);
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const auto row = w.row(r);
    double acc = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
  return y;
}

// ---------------------------------------------------------------------------
// Rng

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  // 2^53 + 1 grid points so both endpoints are reachable.
  const std::uint64_t k = engine_() % ((std::uint64_t{1} << 53) + 1);
  return std::clamp(lo + (hi - lo) * (static_cast<double>(k) * 0x1.0p-53), lo,
                    hi);
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) fail(ErrorKind::kConfig, "uniform_index over an empty range");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = engine_();
  while (v >= limit) v = engine_();
  return static_cast<std::size_t>(v % bound);
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = base ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// MLP

MlpParams::MlpParams(std::vector<DenseLayer> layers)
    : layers_(std::move(layers)) {
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& layer = layers_[k];
    if (layer.weight.empty()) {
      fail(ErrorKind::kShape, "layer " + std::to_string(k) + " has no weights");
    }
    if (layer.bias.size() != layer.weight.rows()) {
      fail(ErrorKind::kShape,
           "layer " + std::to_string(k) + " bias length " +
               std::to_string(layer.bias.size()) + " != out dim " +
               std::to_string(layer.weight.rows()));
    }
    if (k > 0 && layers_[k - 1].weight.rows() != layer.weight.cols()) {
      fail(ErrorKind::kShape,
           "layer " + std::to_string(k - 1) + " out dim " +
               std::to_string(layers_[k - 1].weight.rows()) +
               " does not chain into layer " + std::to_string(k) +
               " in dim " + std::to_string(layer.weight.cols()));
    }
  }
}

std::size_t MlpParams::in_dim() const {
  return layers_.empty() ? 0 : layers_.front().weight.cols();
}

std::size_t MlpParams::out_dim() const {
  return layers_.empty() ? 0 : layers_.back().weight.rows();
}

Matrix seeded_init(Rng& rng, std::size_t rows, std::size_t cols, double scale) {
  if (!(scale > 0.0)) fail(ErrorKind::kConfig, "init scale must be > 0");
  std::vector<double> data(rows * cols);
  for (double& v : data) v = rng.uniform(-scale, scale);
  return Matrix(rows, cols, std::move(data));
}

MlpParams random_mlp(Rng& rng, std::span<const std::size_t> dims,
                     Activation hidden, Activation output, double scale) {
  if (dims.size() < 2) fail(ErrorKind::kConfig, "an MLP needs >= 2 widths");
  std::vector<DenseLayer> layers;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    DenseLayer layer;
    layer.weight = seeded_init(rng, dims[k + 1], dims[k], scale);
    const Matrix bias = seeded_init(rng, 1, dims[k + 1], scale);
    layer.bias.assign(bias.data().begin(), bias.data().end());
    layer.activation = (k + 2 == dims.size()) ? output : hidden;
    layers.push_back(std::move(layer));
  }
  return MlpParams(std::move(layers));
}

Vector mlp_forward(const MlpParams& params, std::span<const double> input) {
  if (params.empty()) fail(ErrorKind::kShape, "empty MLP");
  if (input.size() != params.in_dim()) {
    fail(ErrorKind::kShape, "MLP expects input of length " +
                                std::to_string(params.in_dim()) + ", got " +
                                std::to_string(input.size()));
  }
  Vector x(input.begin(), input.end());
  for (const auto& layer : params.layers()) {
    Vector z = matvec(layer.weight, x);
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] += layer.bias[i];
      if (layer.activation == Activation::kRelu) z[i] = std::max(0.0, z[i]);
    }
    x = std::move(z);
  }
  return x;
}

Vector mlp_directional_derivative(const MlpParams& params,
                                  std::span<const double> input,
                                  std::span<const double> direction) {
  if (params.empty()) fail(ErrorKind::kShape, "empty MLP");
  if (input.size() != params.in_dim() || direction.size() != params.in_dim()) {
    fail(ErrorKind::kShape, "directional derivative operand lengths differ "
                            "from MLP input dim " +
                                std::to_string(params.in_dim()));
  }
  Vector x(input.begin(), input.end());
  Vector dx(direction.begin(), direction.end());
  for (const auto& layer : params.layers()) {
    Vector z = matvec(layer.weight, x);
    Vector dz = matvec(layer.weight, dx);
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] += layer.bias[i];
      if (layer.activation == Activation::kRelu) {
        if (z[i] <= 0.0) {
          z[i] = 0.0;
          dz[i] = 0.0;
        }
      }
    }
    x = std::move(z);
    dx = std::move(dz);
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Softmax / positional encodings

void softmax_inplace(std::span<double> row) {
  if (row.empty()) fail(ErrorKind::kShape, "softmax of an empty row");
  const double peak = *std::max_element(row.begin(), row.end());
  double total = 0.0;
  for (double& v : row) {
    v = std::exp(v - peak);
    total += v;
  }
  for (double& v : row) v /= total;
}

Matrix softmax_rows(const Matrix& m) {
  if (m.empty()) fail(ErrorKind::kShape, "softmax of an empty matrix");
  Matrix out = m;
  for (std::size_t r = 0; r < out.rows(); ++r) softmax_inplace(out.row(r));
  return out;
}

Matrix sinusoidal_pe(std::size_t positions, std::size_t dim) {
  if (dim == 0 || dim % 2 != 0) {
    fail(ErrorKind::kConfig, "positional encoding dim must be even and > 0, got " +
                                 std::to_string(dim));
  }
  if (positions == 0) fail(ErrorKind::kConfig, "positional encoding needs P >= 1");
  Matrix pe(positions, dim);
  for (std::size_t i = 0; i < dim / 2; ++i) {
    const double freq = std::pow(10000.0, static_cast<double>(2 * i) /
                                              static_cast<double>(dim));
    for (std::size_t pos = 0; pos < positions; ++pos) {
      const double angle = static_cast<double>(pos) / freq;
      pe(pos, 2 * i) = std::sin(angle);
      pe(pos, 2 * i + 1) = std::cos(angle);
    }
  }
  return pe;
}

double finite_diff_check(const MlpParams& params, std::span<const double> input,
                         std::span<const double> direction, double h) {
  if (!(h > 0.0)) fail(ErrorKind::kConfig, "finite difference step must be > 0");
  if (l2(direction) == 0.0) {
    fail(ErrorKind::kConfig, "finite difference direction must be nonzero");
  }
  const Vector analytic = mlp_directional_derivative(params, input, direction);

  Vector plus(input.begin(), input.end());
  Vector minus(input.begin(), input.end());
  for (std::size_t i = 0; i < plus.size(); ++i) {
    plus[i] += h * direction[i];
    minus[i] -= h * direction[i];
  }
  const Vector f_plus = mlp_forward(params, plus);
  const Vector f_minus = mlp_forward(params, minus);

  Vector numeric(f_plus.size());
  Vector diff(f_plus.size());
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    numeric[i] = (f_plus[i] - f_minus[i]) / (2.0 * h);
    diff[i] = analytic[i] - numeric[i];
  }
  return l2(diff) / (l2(numeric) + 1e-12);
}

}  // namespace vital
