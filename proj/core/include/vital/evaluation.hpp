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

// Ground truth, rank statistics and correlation reports.
//
// Spearman's rho is the Pearson correlation of fractional (average) ranks.
// Significance comes from a two-sided permutation test over y: exact
// enumeration of all n! orderings for small n, seeded Monte-Carlo resampling
// otherwise. Because the rank variances do not change under permutation,
// the test statistic is the integer-valued rank covariance
// sum((2 r_x - (n+1)) (2 r_y - (n+1))), which makes |rho_perm| >= |rho_obs|
// an exact comparison.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vital/numerics.hpp"
#include "vital/prompting.hpp"

namespace vital {

enum class MaterialCategory {
  kPlastic, kRubber, kMetal, kWood, kCeramic, kGlass, kFoam, kPaper, kTextile
};

inline constexpr std::array<MaterialCategory, 9> kAllMaterialCategories = {
    MaterialCategory::kPlastic, MaterialCategory::kRubber, MaterialCategory::kMetal,
    MaterialCategory::kWood,    MaterialCategory::kCeramic, MaterialCategory::kGlass,
    MaterialCategory::kFoam,    MaterialCategory::kPaper,   MaterialCategory::kTextile};

std::string_view to_string(MaterialCategory category);
/// Throws kValidation listing the nine allowed names.
MaterialCategory parse_material_category(std::string_view name);

struct GroundTruthRecord {
  std::string object_id;
  MaterialCategory material_category = MaterialCategory::kPlastic;
  double shore_hardness = 0.0;   // Shore units
  double elastic_modulus = 0.0;  // MPa
  double roughness_ra = 0.0;     // micrometres

  /// Measurement paired with a scored property.
  double measurement(Property property) const;
};

/// Throws kValidation for duplicate ids, empty ids or non-positive values.
void validate_ground_truth(std::span<const GroundTruthRecord> records);

/// Delimited table with header object_id, material_category, shore_hardness,
/// elastic_modulus_mpa, roughness_ra_um (any column order; comma or tab).
std::vector<GroundTruthRecord> parse_ground_truth_table(std::string_view text);
std::vector<GroundTruthRecord> load_ground_truth(const std::string& path);

struct ScoreRow {
  std::string object_id;
  PropertyScores scores;
};

class ScoreTable {
 public:
  /// Throws kValidation on a duplicate object id or an out-of-range score.
  void add(std::string object_id, PropertyScores scores);
  const std::vector<ScoreRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }

 private:
  std::vector<ScoreRow> rows_;
};

/// 1-based ranks; ties share the mean of their ordinal positions.
Vector fractional_ranks(std::span<const double> x);

/// Throws kInput for length mismatch or n < 2, kDegenerate for a constant series.
double spearman_rho(std::span<const double> x, std::span<const double> y);

/// Min-max scaling into [0, 1]; a constant series maps to zeros. Strictly
/// increasing, so ranks and therefore spearman_rho are unchanged.
Vector min_max_normalize(std::span<const double> x);

enum class PValueMethod { kAuto, kExact, kMonteCarlo };

std::string_view to_string(PValueMethod method);
PValueMethod parse_p_value_method(std::string_view name);

inline constexpr std::size_t kAutoExactMaxN = 8;
inline constexpr std::size_t kExactMaxN = 10;
inline constexpr std::size_t kDefaultResamples = 200000;

struct PValueOptions {
  PValueMethod method = PValueMethod::kAuto;
  std::uint64_t seed = 0;
  std::size_t resamples = kDefaultResamples;
};

struct PValue {
  double value = 1.0;
  PValueMethod method = PValueMethod::kExact;  // resolved, never kAuto
  std::optional<std::uint64_t> seed;           // Monte-Carlo only
  std::size_t resamples = 0;                   // Monte-Carlo only
};

/// Two-sided permutation p = P(|rho_perm| >= |rho_obs|). kAuto picks exact
/// for n <= 8. Exact with n > 10 is kConfig. Monte-Carlo returns
/// (hits + 1) / (resamples + 1).
PValue permutation_p_value(std::span<const double> x, std::span<const double> y,
                           const PValueOptions& options = {});

/// Two-sided Student-t approximation with n - 2 degrees of freedom.
/// Diagnostic only; NaN for n < 3.
double t_approx_p_value(double rho, std::size_t n);

struct CorrelationResult {
  Property property = Property::kHardness;
  double rho = 0.0;
  double rho_reported = 0.0;  // |rho| for elasticity, rho otherwise
  double p_value = 1.0;
  std::size_t n = 0;
  PValueMethod method = PValueMethod::kExact;
  std::optional<std::uint64_t> seed;
  double t_approx_p = 0.0;
  /// Set when a series was constant; rho and p are then 0 and 1.
  bool degenerate = false;
};

/// Reported value under the sign policy: |rho| for elasticity.
double apply_sign_policy(Property property, double rho);

/// Joins on object_id, min-max normalizes both series, computes rho and the
/// permutation p with a generator derived from (options.seed, property).
/// Throws kInsufficientData when fewer than 3 objects join and kData when a
/// joined measurement is missing or non-positive.
CorrelationResult evaluate_property(const ScoreTable& scores,
                                    std::span<const GroundTruthRecord> truth,
                                    Property property,
                                    const PValueOptions& options = {});

struct CorrelationReport {
  std::string dataset_id;
  std::string model_id;
  std::vector<CorrelationResult> results;  // one per property, in kAllProperties order
  double format_compliance = 1.0;
  std::vector<std::string> notes;
};

enum class ReportFormat { kText, kCsv, kJson };

ReportFormat parse_report_format(std::string_view name);

/// Three decimals, e.g. "0.501", "-0.060".
std::string format_rho(double rho);
/// Three significant figures with trailing zeros trimmed, but never fewer
/// than three decimals: 0.005 -> "0.005", 0.0001 -> "0.0001", 1 -> "1.000".
std::string format_p_value(double p);

/// One aligned row of the text table (no newline).
std::string render_report_row(const CorrelationResult& result, std::string_view model_id);

std::string render_report(const CorrelationReport& report, ReportFormat format);

/// Inverse of render_report(..., kCsv).
CorrelationReport parse_report_csv(std::string_view csv);

}  // namespace vital
