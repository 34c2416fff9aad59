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

#include "vital/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "vital/error.hpp"

namespace vital {

std::string_view to_string(MaterialCategory category) {
  switch (category) {
    case MaterialCategory::kPlastic: return "plastic";
    case MaterialCategory::kRubber: return "rubber";
    case MaterialCategory::kMetal: return "metal";
    case MaterialCategory::kWood: return "wood";
    case MaterialCategory::kCeramic: return "ceramic";
    case MaterialCategory::kGlass: return "glass";
    case MaterialCategory::kFoam: return "foam";
    case MaterialCategory::kPaper: return "paper";
    case MaterialCategory::kTextile: return "textile";
  }
  return "unknown";
}

MaterialCategory parse_material_category(std::string_view name) {
  std::string allowed;
  for (auto c : kAllMaterialCategories) {
    if (name == to_string(c)) return c;
    allowed += (allowed.empty() ? "" : ", ") + std::string(to_string(c));
  }
  fail(ErrorKind::kValidation, "unknown material category '" + std::string(name) +
                                   "' (allowed: " + allowed + ")");
}

double GroundTruthRecord::measurement(Property property) const {
  switch (property) {
    case Property::kHardness: return shore_hardness;
    case Property::kElasticity: return elastic_modulus;
    case Property::kRoughness: return roughness_ra;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void validate_ground_truth(std::span<const GroundTruthRecord> records) {
  std::set<std::string> ids;
  for (const auto& r : records) {
    if (r.object_id.empty()) fail(ErrorKind::kValidation, "ground truth row without object_id");
    if (!ids.insert(r.object_id).second) {
      fail(ErrorKind::kValidation, "duplicate object_id '" + r.object_id + "'");
    }
    for (Property p : kAllProperties) {
      const double v = r.measurement(p);
      if (!(v > 0.0) || !std::isfinite(v)) {
        fail(ErrorKind::kValidation, "object '" + r.object_id + "' has non-positive " +
                                         std::string(to_string(p)) + " measurement");
      }
    }
  }
}

namespace {

std::vector<std::string> split_row(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    const auto next = line.find(delim, pos);
    std::string_view cell = line.substr(pos, next == std::string_view::npos ? line.npos : next - pos);
    while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.front()))) cell.remove_prefix(1);
    while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back()))) cell.remove_suffix(1);
    out.emplace_back(cell);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

double parse_measurement(const std::string& cell, std::size_t line, std::string_view column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::kValidation, "line " + std::to_string(line) + ": " +
                                     std::string(column) + " '" + cell +
                                     "' is not a number");
  }
}

}  // namespace

std::vector<GroundTruthRecord> parse_ground_truth_table(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  std::size_t header_index = 0;
  while (header_index < lines.size() &&
         (lines[header_index].empty() || lines[header_index].front() == '#')) {
    ++header_index;
  }
  if (header_index == lines.size()) fail(ErrorKind::kValidation, "ground truth table is empty");
  const char delim = lines[header_index].find('\t') != std::string_view::npos ? '\t' : ',';
  const auto header = split_row(lines[header_index], delim);
  static constexpr std::array<std::string_view, 5> kColumns = {
      "object_id", "material_category", "shore_hardness", "elastic_modulus_mpa",
      "roughness_ra_um"};
  std::array<std::size_t, 5> index{};
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    const auto it = std::find(header.begin(), header.end(), kColumns[c]);
    if (it == header.end()) {
      fail(ErrorKind::kValidation, "ground truth header lacks column '" +
                                       std::string(kColumns[c]) + "'");
    }
    index[c] = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<GroundTruthRecord> records;
  for (std::size_t i = header_index + 1; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i].front() == '#') continue;
    const std::size_t line_no = i + 1;
    const auto cells = split_row(lines[i], delim);
    if (cells.size() != header.size()) {
      fail(ErrorKind::kValidation, "line " + std::to_string(line_no) + ": expected " +
                                       std::to_string(header.size()) + " cells, got " +
                                       std::to_string(cells.size()));
    }
    GroundTruthRecord r;
    r.object_id = cells[index[0]];
    try {
      r.material_category = parse_material_category(cells[index[1]]);
    } catch (const Error& e) {
      fail(ErrorKind::kValidation, "line " + std::to_string(line_no) + ": " + e.what());
    }
    r.shore_hardness = parse_measurement(cells[index[2]], line_no, kColumns[2]);
    r.elastic_modulus = parse_measurement(cells[index[3]], line_no, kColumns[3]);
    r.roughness_ra = parse_measurement(cells[index[4]], line_no, kColumns[4]);
    records.push_back(std::move(r));
  }
  validate_ground_truth(records);
  return records;
}

std::vector<GroundTruthRecord> load_ground_truth(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open ground truth " + path);
  const std::string text(std::istreambuf_iterator<char>(in), {});
  return parse_ground_truth_table(text);
}

void ScoreTable::add(std::string object_id, PropertyScores scores) {
  for (const auto& row : rows_) {
    if (row.object_id == object_id) {
      fail(ErrorKind::kValidation, "duplicate score row for '" + object_id + "'");
    }
  }
  for (Property p : kAllProperties) {
    const int s = scores.score(p);
    if (s < kMinScore || s > kMaxScore) {
      fail(ErrorKind::kValidation, "score row '" + object_id + "' has " +
                                       std::string(to_string(p)) + " = " +
                                       std::to_string(s));
    }
  }
  rows_.push_back({std::move(object_id), std::move(scores)});
}

// ---------------------------------------------------------------------------
// Rank statistics

Vector fractional_ranks(std::span<const double> x) {
  for (double v : x) {
    if (std::isnan(v)) fail(ErrorKind::kInput, "cannot rank NaN");
  }
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  Vector ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    // Positions i+1 .. j share their mean.
    const double mean = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mean;
    i = j;
  }
  return ranks;
}

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    fail(ErrorKind::kInput, "series lengths differ (" + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) fail(ErrorKind::kInput, "rank correlation needs n >= 2");
}

// 2 * rank - (n + 1): integer-valued for fractional ranks.
std::vector<double> centered_doubled(const Vector& ranks) {
  const double n1 = static_cast<double>(ranks.size() + 1);
  std::vector<double> out(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) out[i] = 2.0 * ranks[i] - n1;
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto cx = centered_doubled(fractional_ranks(x));
  const auto cy = centered_doubled(fractional_ranks(y));
  const double sxx = dot(cx, cx);
  const double syy = dot(cy, cy);
  if (sxx == 0.0 || syy == 0.0) {
    fail(ErrorKind::kDegenerate, "rank correlation of a constant series");
  }
  const double rho = dot(cx, cy) / std::sqrt(sxx * syy);
  return std::clamp(rho, -1.0, 1.0);
}

Vector min_max_normalize(std::span<const double> x) {
  if (x.empty()) return {};
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double min = *lo;
  const double range = *hi - *lo;
  Vector out(x.size(), 0.0);
  if (range == 0.0) return out;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - min) / range;
  return out;
}

std::string_view to_string(PValueMethod method) {
  switch (method) {
    case PValueMethod::kAuto: return "auto";
    case PValueMethod::kExact: return "exact";
    case PValueMethod::kMonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

PValueMethod parse_p_value_method(std::string_view name) {
  for (auto m : {PValueMethod::kAuto, PValueMethod::kExact, PValueMethod::kMonteCarlo}) {
    if (name == to_string(m)) return m;
  }
  fail(ErrorKind::kConfig, "unknown p-value method '" + std::string(name) +
                               "' (expected auto, exact or monte_carlo)");
}

PValue permutation_p_value(std::span<const double> x, std::span<const double> y,
                           const PValueOptions& options) {
  // Validates n and rejects constant series.
  (void)spearman_rho(x, y);
  const std::size_t n = x.size();
  const auto cx = centered_doubled(fractional_ranks(x));
  auto cy = centered_doubled(fractional_ranks(y));
  const double observed = std::abs(dot(cx, cy));

  PValueMethod method = options.method;
  if (method == PValueMethod::kAuto) {
    method = n <= kAutoExactMaxN ? PValueMethod::kExact : PValueMethod::kMonteCarlo;
  }

  PValue out;
  out.method = method;
  if (method == PValueMethod::kExact) {
    if (n > kExactMaxN) {
      fail(ErrorKind::kConfig, "exact permutation test limited to n <= " +
                                   std::to_string(kExactMaxN) + " (got " +
                                   std::to_string(n) + ")");
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::uint64_t hits = 0;
    std::uint64_t total = 0;
    do {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += cx[i] * cy[perm[i]];
      if (std::abs(s) >= observed) ++hits;
      ++total;
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.value = static_cast<double>(hits) / static_cast<double>(total);
    return out;
  }

  if (options.resamples == 0) fail(ErrorKind::kConfig, "Monte-Carlo needs resamples >= 1");
  Rng rng(options.seed);
  std::uint64_t hits = 0;
  for (std::size_t r = 0; r < options.resamples; ++r) {
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(cy[i], cy[rng.uniform_index(i + 1)]);
    }
    if (std::abs(dot(cx, cy)) >= observed) ++hits;
  }
  out.value = static_cast<double>(hits + 1) / static_cast<double>(options.resamples + 1);
  out.seed = options.seed;
  out.resamples = options.resamples;
  return out;
}

double t_approx_p_value(double rho, std::size_t n) {
  if (n < 3) return std::numeric_limits<double>::quiet_NaN();
  const double df = static_cast<double>(n - 2);
  const double r2 = rho * rho;
  if (r2 >= 1.0) return 0.0;
  const double t = std::abs(rho) * std::sqrt(df / (1.0 - r2));
  const boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

double apply_sign_policy(Property property, double rho) {
  return property == Property::kElasticity ? std::abs(rho) : rho;
}

CorrelationResult evaluate_property(const ScoreTable& scores,
                                    std::span<const GroundTruthRecord> truth,
                                    Property property, const PValueOptions& options) {
  std::map<std::string, const GroundTruthRecord*> by_id;
  for (const auto& r : truth) {
    if (!by_id.emplace(r.object_id, &r).second) {
      fail(ErrorKind::kValidation, "duplicate ground truth id '" + r.object_id + "'");
    }
  }
  Vector model;
  Vector measured;
  for (const auto& row : scores.rows()) {
    const auto it = by_id.find(row.object_id);
    if (it == by_id.end()) continue;
    const double m = it->second->measurement(property);
    if (!(m > 0.0) || !std::isfinite(m)) {
      fail(ErrorKind::kData, "object '" + row.object_id + "' lacks a valid " +
                                 std::string(to_string(property)) + " measurement");
    }
    model.push_back(static_cast<double>(row.scores.score(property)));
    measured.push_back(m);
  }
  if (model.size() < 3) {
    fail(ErrorKind::kInsufficientData,
         std::to_string(model.size()) + " objects joined for " +
             std::string(to_string(property)) + " (need >= 3)");
  }

  const Vector model_n = min_max_normalize(model);
  const Vector measured_n = min_max_normalize(measured);

  PValueOptions per_property = options;
  per_property.seed = derive_seed(options.seed, to_string(property));

  CorrelationResult result;
  result.property = property;
  result.n = model.size();
  result.rho = spearman_rho(model_n, measured_n);
  result.rho_reported = apply_sign_policy(property, result.rho);
  const PValue p = permutation_p_value(model_n, measured_n, per_property);
  result.p_value = p.value;
  result.method = p.method;
  result.seed = p.seed;
  result.t_approx_p = t_approx_p_value(result.rho, result.n);
  return result;
}

}  // namespace vital
