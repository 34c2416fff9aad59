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

#include "vital/prompting.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "vital/error.hpp"

namespace vital {

std::string_view to_string(Property property) {
  switch (property) {
    case Property::kHardness: return "hardness";
    case Property::kElasticity: return "elasticity";
    case Property::kRoughness: return "roughness";
  }
  return "unknown";
}

std::string_view contract_key(Property property) {
  switch (property) {
    case Property::kHardness: return "HARDNESS";
    case Property::kElasticity: return "ELASTICITY";
    case Property::kRoughness: return "ROUGHNESS";
  }
  return "UNKNOWN";
}

std::string_view display_name(Property property) {
  switch (property) {
    case Property::kHardness: return "Hardness";
    case Property::kElasticity: return "Elasticity";
    case Property::kRoughness: return "Roughness";
  }
  return "Unknown";
}

Property parse_property(std::string_view name) {
  for (Property p : kAllProperties) {
    if (name == to_string(p)) return p;
  }
  fail(ErrorKind::kConfig, "unknown property '" + std::string(name) + "'");
}

std::string_view to_string(ParseMode mode) {
  return mode == ParseMode::kStrict ? "strict" : "lenient";
}

ParseMode parse_mode(std::string_view name) {
  if (name == "strict") return ParseMode::kStrict;
  if (name == "lenient") return ParseMode::kLenient;
  fail(ErrorKind::kConfig, "unknown parse mode '" + std::string(name) +
                               "' (expected strict or lenient)");
}

// ---------------------------------------------------------------------------
// Rating scales

namespace {

const std::array<RatingScale, 3>& scales() {
  static const std::array<RatingScale, 3> kScales = {{
      {Property::kHardness,
       {{{1, 2, "Extremely soft", "Cotton, sponge"},
         {3, 4, "Soft", "Rubber ball, soft plastic toy"},
         {5, 6, "Medium", "Plastic container, shoe sole"},
         {7, 8, "Hard", "Wood, ceramic plate"},
         {9, 10, "Extremely hard", "Metal, diamond"}}}},
      {Property::kElasticity,
       {{{1, 2, "Minimal elasticity", "Clay, dry sponge, wooden ruler"},
         {3, 4, "Low elasticity", "Rubber eraser, hard plastic, book cover"},
         {5, 6, "Medium elasticity", "Foam ball, silicone, thick rubber mat"},
         {7, 8, "High elasticity", "Rubber band, bouncy ball, yoga mat"},
         {9, 10, "Maximum elasticity",
          "Trampoline surface, latex sheet, inflated balloon"}}}},
      {Property::kRoughness,
       {{{1, 2, "Extremely smooth", "Glass, polished marble"},
         {3, 4, "Smooth", "Plastic surface, ceramic mug"},
         {5, 6, "Medium texture", "Paper, leather, cardboard"},
         {7, 8, "Rough", "Sandpaper, concrete, bark of a tree"},
         {9, 10, "Extremely rough", "Gravel, coarse fabric, pumice stone"}}}},
  }};
  return kScales;
}

}  // namespace

RatingScale default_rating_scale(Property property) {
  return scales()[static_cast<std::size_t>(property)];
}

const std::string& scale_lookup(Property property, int score) {
  if (score < kMinScore || score > kMaxScore) {
    fail(ErrorKind::kRange, std::string(to_string(property)) + " score " +
                                std::to_string(score) + " outside 1..10");
  }
  for (const auto& band : scales()[static_cast<std::size_t>(property)].bands) {
    if (score >= band.lo && score <= band.hi) return band.characterization;
  }
  fail(ErrorKind::kRange, "no band for score " + std::to_string(score));
}

// ---------------------------------------------------------------------------
// Prompt

PromptSpec default_prompt_spec() {
  PromptSpec spec;
  spec.version = "vital-prompt/1";
  spec.goal =
      "You are assessing the physical properties of a single object from an "
      "object image and a sequence of tactile sensor frames recorded while a "
      "gel-based sensor pressed against it. Reason about the specific material "
      "in front of you; an answer that would fit any object is not useful.";
  spec.phase1_instructions =
      "Phase 1 - identify the object from the image. Note its color, its shape "
      "and its visible surface texture, then name the object and the cues that "
      "support the identification.";
  spec.phase2_instructions =
      "Phase 2 - evaluate material and touch together. Infer the material from "
      "the visual cues and the tactile frames (imprint depth, gel deformation "
      "and recovery, fine texture in the contact patch). Rate hardness from the "
      "pressure response, elasticity from how the surface deforms and springs "
      "back, and roughness from the surface texture, each on the 10-point "
      "scales below.";
  for (Property p : kAllProperties) spec.scales.push_back(default_rating_scale(p));
  spec.constraints = {
      "Scores are whole numbers from 1 to 10.",
      "Spread scores across the scale when the evidence supports it; do not "
      "fall back to the middle band.",
      "Each rationale names the material evidence behind the score.",
      "Do not write anything outside the answer format.",
  };
  spec.output_contract = std::string(kOutputContract);
  return spec;
}

void validate_prompt_spec(const PromptSpec& spec) {
  if (spec.phase1_instructions.empty() || spec.phase2_instructions.empty()) {
    fail(ErrorKind::kConfig, "prompt spec needs both phase instructions");
  }
  if (spec.output_contract != kOutputContract) {
    fail(ErrorKind::kConfig, "prompt spec output contract differs from the "
                             "parser's answer grammar");
  }
  for (Property p : kAllProperties) {
    const auto count = std::count_if(
        spec.scales.begin(), spec.scales.end(),
        [p](const RatingScale& s) { return s.property == p; });
    if (count != 1) {
      fail(ErrorKind::kConfig, "prompt spec needs exactly one " +
                                   std::string(to_string(p)) + " scale");
    }
  }
  for (const auto& scale : spec.scales) {
    for (std::size_t i = 0; i < scale.bands.size(); ++i) {
      const auto& band = scale.bands[i];
      const int lo = static_cast<int>(2 * i + 1);
      if (band.lo != lo || band.hi != lo + 1 || band.characterization.empty()) {
        fail(ErrorKind::kConfig, std::string(to_string(scale.property)) +
                                     " scale band " + std::to_string(i) +
                                     " must cover [" + std::to_string(lo) + "," +
                                     std::to_string(lo + 1) +
                                     "] with a characterization");
      }
    }
  }
}

std::string build_prompt(const PromptSpec& spec,
                         const std::optional<std::string>& object_hint) {
  validate_prompt_spec(spec);
  std::ostringstream out;
  out << spec.goal << "\n\n" << spec.phase1_instructions << "\n";
  if (object_hint && !object_hint->empty()) {
    out << "The operator says the object may be: " << *object_hint << ".\n";
  }
  out << "\n" << spec.phase2_instructions << "\n";
  for (Property p : kAllProperties) {
    const auto& scale = *std::find_if(
        spec.scales.begin(), spec.scales.end(),
        [p](const RatingScale& s) { return s.property == p; });
    out << "\n" << contract_key(p) << " scale (1-10):\n";
    for (const auto& band : scale.bands) {
      out << "  " << band.lo << "-" << band.hi << ": " << band.characterization;
      if (!band.examples.empty()) out << " (e.g. " << band.examples << ")";
      out << "\n";
    }
  }
  if (!spec.constraints.empty()) {
    out << "\nConstraints:\n";
    for (const auto& c : spec.constraints) out << "- " << c << "\n";
  }
  out << "\nAnswer with exactly these five lines:\n" << spec.output_contract << "\n";
  return out.str();
}

std::uint64_t prompt_checksum(const PromptSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : build_prompt(spec)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Scores

int PropertyScores::score(Property property) const {
  switch (property) {
    case Property::kHardness: return hardness;
    case Property::kElasticity: return elasticity;
    case Property::kRoughness: return roughness;
  }
  return 0;
}

std::string render_contract(const PropertyScores& scores) {
  auto no_newline = [](const std::string& s, std::string_view what) {
    if (s.find_first_of("\r\n") != std::string::npos) {
      fail(ErrorKind::kInput, std::string(what) + " contains a newline");
    }
  };
  if (scores.object_name.empty()) fail(ErrorKind::kInput, "empty object name");
  no_newline(scores.object_name, "object name");
  no_newline(scores.material, "material");
  std::string out = "OBJECT: " + scores.object_name + "\nMATERIAL: " +
                    scores.material + "\n";
  for (Property p : kAllProperties) {
    const int s = scores.score(p);
    if (s < kMinScore || s > kMaxScore) {
      fail(ErrorKind::kRange, std::string(to_string(p)) + " score " +
                                  std::to_string(s) + " outside 1..10");
    }
    const auto it = scores.rationales.find(p);
    const std::string rationale = it == scores.rationales.end() ? "" : it->second;
    no_newline(rationale, "rationale");
    if (rationale.find('|') != std::string::npos) {
      fail(ErrorKind::kInput, "rationale contains '|'");
    }
    out += std::string(contract_key(p)) + ": " + std::to_string(s) + " | " +
           rationale + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

constexpr std::string_view kSpace = " \t\r\f\v";

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kSpace);
  return s.substr(b, e - b + 1);
}

// Trailing '.', ',', ';' and UTF-8 ellipses left over from prose.
std::string_view trim_trailing_punct(std::string_view s) {
  static constexpr std::string_view kEllipsis = "\xE2\x80\xA6";
  for (;;) {
    s = trim(s);
    if (s.size() >= kEllipsis.size() &&
        s.substr(s.size() - kEllipsis.size()) == kEllipsis) {
      s.remove_suffix(kEllipsis.size());
    } else if (!s.empty() && (s.back() == '.' || s.back() == ',' || s.back() == ';')) {
      s.remove_suffix(1);
    } else {
      return s;
    }
  }
}

struct Line {
  std::size_t number;  // 1-based
  std::string_view text;
};

std::vector<Line> nonblank_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    ++number;
    const auto t = trim(text.substr(pos, end - pos));
    if (!t.empty()) lines.push_back({number, t});
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

enum class Key { kObject, kMaterial, kHardness, kElasticity, kRoughness };
constexpr std::array<std::string_view, 5> kKeyNames = {
    "OBJECT", "MATERIAL", "HARDNESS", "ELASTICITY", "ROUGHNESS"};

bool is_score_key(std::size_t k) { return k >= 2; }
Property key_property(std::size_t k) { return kAllProperties[k - 2]; }

enum class ScoreToken { kInteger, kNonInteger, kMissing };

struct ScoreValue {
  ScoreToken kind = ScoreToken::kMissing;
  long long value = 0;
  std::string_view text;
  std::string_view rest;  // text after the number
};

// Reads a leading number from s (after whitespace).
ScoreValue read_score(std::string_view s) {
  ScoreValue out;
  const auto b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return out;
  std::size_t i = b;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  const std::size_t digits_begin = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  std::size_t int_digits = i - digits_begin;
  bool fractional = false;
  if (i + 1 < s.size() && s[i] == '.' &&
      std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
    fractional = true;
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  }
  if (int_digits == 0 && !fractional) return out;
  // "7abc" is not a number.
  if (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) return out;
  out.text = s.substr(b, i - b);
  out.rest = s.substr(i);
  if (fractional) {
    out.kind = ScoreToken::kNonInteger;
    return out;
  }
  const char* first = s.data() + digits_begin;
  long long v = 0;
  auto [ptr, ec] = std::from_chars(first, s.data() + i, v);
  if (ec != std::errc()) {
    v = 1000000;  // overflowed: certainly out of range
  }
  (void)ptr;
  out.value = s[b] == '-' ? -v : v;
  out.kind = ScoreToken::kInteger;
  return out;
}

int checked_score(Property p, const ScoreValue& v) {
  if (v.kind == ScoreToken::kNonInteger) {
    fail(ErrorKind::kRange, std::string(contract_key(p)) + " score '" +
                                std::string(v.text) + "' is not an integer in 1..10");
  }
  if (v.value < kMinScore || v.value > kMaxScore) {
    fail(ErrorKind::kRange, std::string(contract_key(p)) + " score " +
                                std::string(v.text) + " outside 1..10");
  }
  return static_cast<int>(v.value);
}

void set_score(PropertyScores& scores, Property p, int value) {
  switch (p) {
    case Property::kHardness: scores.hardness = value; break;
    case Property::kElasticity: scores.elasticity = value; break;
    case Property::kRoughness: scores.roughness = value; break;
  }
}

// "KEY:" prefix with exact case; returns the value after the colon.
std::optional<std::string_view> strict_value(std::string_view line,
                                             std::string_view key) {
  if (line.size() <= key.size() || line.substr(0, key.size()) != key ||
      line[key.size()] != ':') {
    return std::nullopt;
  }
  return line.substr(key.size() + 1);
}

std::optional<std::size_t> strict_key_of(std::string_view line) {
  for (std::size_t k = 0; k < kKeyNames.size(); ++k) {
    if (strict_value(line, kKeyNames[k])) return k;
  }
  return std::nullopt;
}

[[noreturn]] void line_error(const Line& line, const std::string& what) {
  fail(ErrorKind::kParse, "line " + std::to_string(line.number) + " ('" +
                              std::string(line.text) + "'): " + what);
}

PropertyScores parse_strict(std::string_view text) {
  const auto lines = nonblank_lines(text);

  // Range violations take precedence over layout errors.
  for (const auto& line : lines) {
    for (std::size_t k = 2; k < kKeyNames.size(); ++k) {
      if (auto v = strict_value(line.text, kKeyNames[k])) {
        const auto score = read_score(*v);
        if (score.kind != ScoreToken::kMissing) checked_score(key_property(k), score);
      }
    }
  }

  PropertyScores scores;
  std::array<bool, 5> seen{};
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    const auto key = strict_key_of(line.text);
    if (i >= kKeyNames.size()) {
      if (key && is_score_key(*key)) line_error(line, "duplicate " + std::string(kKeyNames[*key]) + " line");
      line_error(line, "unexpected line after the five contract lines");
    }
    const std::string_view expected = kKeyNames[i];
    if (!key || *key != i) {
      if (key && seen[*key]) {
        line_error(line, "duplicate " + std::string(kKeyNames[*key]) + " line");
      }
      line_error(line, "expected '" + std::string(expected) + ":' line");
    }
    seen[i] = true;
    const std::string_view value = trim(*strict_value(line.text, expected));
    if (i < 2) {
      if (value.empty()) line_error(line, "empty " + std::string(expected) + " value");
      (i == 0 ? scores.object_name : scores.material) = std::string(value);
      continue;
    }
    const Property p = key_property(i);
    const auto score = read_score(value);
    if (score.kind == ScoreToken::kMissing) line_error(line, "score is not a number");
    const int s = checked_score(p, score);
    const auto rest = trim(score.rest);
    if (rest.empty() || rest.front() != '|') {
      line_error(line, "expected '<score> | <rationale>'");
    }
    const auto rationale = trim(rest.substr(1));
    if (rationale.empty()) line_error(line, "empty rationale");
    set_score(scores, p, s);
    scores.rationales[p] = std::string(rationale);
  }
  if (lines.size() < kKeyNames.size()) {
    fail(ErrorKind::kParse, "missing '" + std::string(kKeyNames[lines.size()]) +
                                ":' line (response has " +
                                std::to_string(lines.size()) + " non-blank lines)");
  }
  return scores;
}

struct Occurrence {
  std::size_t key;
  std::size_t begin;  // start of the key word
  std::size_t value;  // first byte after ':'
};

bool ieq(char a, char b) {
  return std::toupper(static_cast<unsigned char>(a)) ==
         std::toupper(static_cast<unsigned char>(b));
}

std::vector<Occurrence> find_keys(std::string_view text) {
  std::vector<Occurrence> out;
  for (std::size_t pos = 0; pos < text.size(); ++pos) {
    if (pos > 0 && std::isalnum(static_cast<unsigned char>(text[pos - 1]))) continue;
    for (std::size_t k = 0; k < kKeyNames.size(); ++k) {
      const auto name = kKeyNames[k];
      if (pos + name.size() > text.size()) continue;
      bool match = true;
      for (std::size_t j = 0; j < name.size() && match; ++j) {
        match = ieq(text[pos + j], name[j]);
      }
      if (!match) continue;
      std::size_t after = pos + name.size();
      while (after < text.size() && (text[after] == ' ' || text[after] == '\t')) ++after;
      if (after < text.size() && text[after] == ':') {
        out.push_back({k, pos, after + 1});
        break;
      }
    }
  }
  return out;
}

ParsedResponse parse_lenient(std::string_view text, const std::string& strict_error) {
  ParsedResponse result;
  result.mode = ParseMode::kLenient;
  auto& warnings = result.warnings;
  warnings.push_back("response deviates from the strict contract (" + strict_error + ")");

  const auto occ = find_keys(text);
  std::array<std::optional<std::size_t>, 5> first{};
  for (std::size_t i = 0; i < occ.size(); ++i) {
    const auto k = occ[i].key;
    if (!first[k]) {
      first[k] = i;
    } else {
      warnings.push_back("duplicate " + std::string(kKeyNames[k]) +
                         " ignored (first occurrence used)");
    }
  }

  // Value of occurrence i: up to the next key occurrence or end of line.
  auto value_of = [&](std::size_t i) {
    std::size_t end = text.find('\n', occ[i].value);
    if (end == std::string_view::npos) end = text.size();
    if (i + 1 < occ.size()) end = std::min(end, occ[i + 1].begin);
    return text.substr(occ[i].value, end - occ[i].value);
  };

  for (std::size_t k = 0; k < kKeyNames.size(); ++k) {
    if (!first[k]) continue;
    const auto& o = occ[*first[k]];
    const auto word = text.substr(o.begin, kKeyNames[k].size());
    if (word != kKeyNames[k]) {
      warnings.push_back("key '" + std::string(word) + "' is not upper case");
    }
    const auto nl = o.begin == 0 ? std::string_view::npos : text.rfind('\n', o.begin - 1);
    const std::size_t line_begin = nl == std::string_view::npos ? 0 : nl + 1;
    const bool line_start = trim(text.substr(line_begin, o.begin - line_begin)).empty();
    if (!line_start) {
      warnings.push_back(std::string(kKeyNames[k]) + " does not start a line");
    }
  }

  std::size_t last_begin = 0;
  bool ordered = true;
  for (std::size_t k = 0; k < kKeyNames.size(); ++k) {
    if (!first[k]) continue;
    const auto b = occ[*first[k]].begin;
    if (b < last_begin) ordered = false;
    last_begin = b;
  }
  if (!ordered) warnings.push_back("keys appear out of contract order");

  auto& scores = result.scores;
  for (std::size_t k = 0; k < 2; ++k) {
    std::string value;
    if (first[k]) {
      auto v = trim(value_of(*first[k]));
      const auto cut = v.find_first_of(",;|");
      if (cut != std::string_view::npos) v = v.substr(0, cut);
      value = std::string(trim_trailing_punct(v));
    }
    if (value.empty()) {
      warnings.push_back(std::string(kKeyNames[k]) + " missing; recorded as 'unknown'");
      value = "unknown";
    }
    (k == 0 ? scores.object_name : scores.material) = value;
  }

  for (std::size_t k = 2; k < kKeyNames.size(); ++k) {
    const Property p = key_property(k);
    if (!first[k]) {
      fail(ErrorKind::kParse, "no " + std::string(kKeyNames[k]) + " score in response");
    }
    const auto score = read_score(value_of(*first[k]));
    if (score.kind == ScoreToken::kMissing) {
      fail(ErrorKind::kParse, std::string(kKeyNames[k]) + " has no numeric score");
    }
    set_score(scores, p, checked_score(p, score));
    auto rest = trim(score.rest);
    if (rest.rfind("/10", 0) == 0) rest = trim(rest.substr(3));
    if (!rest.empty() && rest.front() == '|') {
      rest = rest.substr(1);
    } else {
      warnings.push_back(std::string(kKeyNames[k]) + " lacks the '|' separator");
      while (!rest.empty() && (rest.front() == '-' || rest.front() == ':' ||
                               rest.front() == ',' || rest.front() == '/')) {
        rest = trim(rest.substr(1));
      }
    }
    const auto rationale = trim_trailing_punct(rest);
    if (rationale.empty()) {
      warnings.push_back(std::string(kKeyNames[k]) + " has no rationale");
    }
    scores.rationales[p] = std::string(rationale);
  }
  return result;
}

}  // namespace

ParsedResponse parse_response(std::string_view text, ParseMode mode) {
  if (mode == ParseMode::kStrict) {
    ParsedResponse out;
    out.scores = parse_strict(text);
    out.mode = ParseMode::kStrict;
    return out;
  }
  try {
    ParsedResponse out;
    out.scores = parse_strict(text);
    out.mode = ParseMode::kLenient;
    return out;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kParse) throw;
    return parse_lenient(text, e.what());
  }
}

}  // namespace vital
