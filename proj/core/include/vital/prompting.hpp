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

// Structured property-scoring prompt and the parser for its answer contract.
//
// The answer contract is five lines:
//
//   OBJECT: <name>
//   MATERIAL: <material>
//   HARDNESS: <1-10> | <rationale>
//   ELASTICITY: <1-10> | <rationale>
//   ROUGHNESS: <1-10> | <rationale>
//
// Strict parsing accepts exactly that grammar. Lenient parsing scans free
// text for the first occurrence of each key and records one warning per
// deviation, which lets evaluation report a format-compliance rate.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vital {

enum class Property { kHardness, kElasticity, kRoughness };

inline constexpr std::array<Property, 3> kAllProperties = {
    Property::kHardness, Property::kElasticity, Property::kRoughness};

/// "hardness", "elasticity", "roughness".
std::string_view to_string(Property property);
/// "HARDNESS", ... as used in the answer contract.
std::string_view contract_key(Property property);
/// "Hardness", ... for reports.
std::string_view display_name(Property property);
/// Inverse of to_string; throws kConfig.
Property parse_property(std::string_view name);

struct ScaleBand {
  int lo = 0;
  int hi = 0;
  std::string characterization;
  std::string examples;
};

struct RatingScale {
  Property property = Property::kHardness;
  std::array<ScaleBand, 5> bands;
};

/// The shipped 10-point scales: five two-point bands per property.
RatingScale default_rating_scale(Property property);

/// Characterization of the band containing score. Throws kRange outside 1..10.
const std::string& scale_lookup(Property property, int score);

inline constexpr int kMinScore = 1;
inline constexpr int kMaxScore = 10;

inline constexpr std::string_view kOutputContract =
    "OBJECT: <name>\n"
    "MATERIAL: <material>\n"
    "HARDNESS: <1-10> | <rationale>\n"
    "ELASTICITY: <1-10> | <rationale>\n"
    "ROUGHNESS: <1-10> | <rationale>";

struct PromptSpec {
  std::string version;
  std::string goal;
  std::string phase1_instructions;
  std::string phase2_instructions;
  std::vector<RatingScale> scales;
  std::vector<std::string> constraints;
  std::string output_contract;
};

PromptSpec default_prompt_spec();

/// Throws kConfig unless every property has a well-formed scale, phases are
/// present and the output contract equals kOutputContract.
void validate_prompt_spec(const PromptSpec& spec);

/// Goal, phase 1, optional object hint, phase 2, the three scale tables, the
/// constraints and the output contract, in that order.
std::string build_prompt(const PromptSpec& spec,
                         const std::optional<std::string>& object_hint = std::nullopt);

/// FNV-1a 64 of build_prompt(spec) without a hint. Pins the prompt wording.
std::uint64_t prompt_checksum(const PromptSpec& spec);

struct PropertyScores {
  std::string object_name;
  std::string material;
  int hardness = 0;
  int elasticity = 0;
  int roughness = 0;
  std::map<Property, std::string> rationales;

  int score(Property property) const;

  friend bool operator==(const PropertyScores&, const PropertyScores&) = default;
};

/// Renders scores in the answer contract (trailing newline included).
/// Throws kRange for out-of-range scores and kInput for values that would not
/// parse back (newlines anywhere, '|' in a rationale, empty name).
std::string render_contract(const PropertyScores& scores);

enum class ParseMode { kStrict, kLenient };

std::string_view to_string(ParseMode mode);
ParseMode parse_mode(std::string_view name);

struct ParsedResponse {
  PropertyScores scores;
  ParseMode mode = ParseMode::kStrict;
  std::vector<std::string> warnings;
};

/// kRange for any taken score outside 1..10 (both modes). Strict: kParse
/// naming the offending line for missing, malformed, duplicate or extra
/// lines. Lenient: kParse only when a score key cannot be found at all.
ParsedResponse parse_response(std::string_view text, ParseMode mode);

}  // namespace vital
