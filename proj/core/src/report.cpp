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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "vital/error.hpp"
#include "vital/evaluation.hpp"

namespace vital {

namespace {

constexpr std::string_view kReportTitle =
    "Zero-shot evaluation: Spearman's rank correlation between model scores and ground truth";

constexpr std::array<std::string_view, 12> kCsvHeader = {
    "dataset", "model", "property", "rho", "rho_reported", "p_value", "n",
    "method",  "seed",  "t_approx_p", "format_compliance", "status"};

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string pad(std::string_view s, std::size_t width) {
  std::string out(s);
  if (out.size() < width) out.append(width - out.size(), ' ');
  return out;
}

std::string csv_cell(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::size_t method_width(std::string_view model_id) {
  return std::max<std::size_t>(16, model_id.size() + 2);
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "text" || name == "txt") return ReportFormat::kText;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  fail(ErrorKind::kConfig, "unknown report format '" + std::string(name) +
                               "' (expected text, csv or json)");
}

std::string format_rho(double rho) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", rho);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string format_p_value(double p) {
  if (!std::isfinite(p)) return "nan";
  int decimals = 3;
  if (p > 0.0) decimals = std::max(3, 2 - static_cast<int>(std::floor(std::log10(p))));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, p);
  std::string s = buf;
  const auto dot = s.find('.');
  while (s.size() > dot + 4 && s.back() == '0') s.pop_back();
  return s;
}

std::string render_report_row(const CorrelationResult& result, std::string_view model_id) {
  std::string row = pad(display_name(result.property), 12);
  row += pad(model_id, method_width(model_id));
  row += pad(format_rho(result.rho_reported), 14);
  row += pad(format_p_value(result.p_value), 10);
  row += std::to_string(result.n);
  return row;
}

namespace {

std::string render_text(const CorrelationReport& report) {
  std::ostringstream out;
  out << kReportTitle << '\n';
  char compliance[32];
  std::snprintf(compliance, sizeof compliance, "%.3f", report.format_compliance);
  out << "dataset: " << report.dataset_id << "  model: " << report.model_id
      << "  format compliance: " << compliance << "\n\n";
  out << pad("Attribute", 12) << pad("Method", method_width(report.model_id))
      << pad("Correlation", 14) << pad("P-value", 10) << "n\n";
  std::vector<std::string> footnotes;
  for (const auto& r : report.results) {
    out << render_report_row(r, report.model_id) << '\n';
    if (r.degenerate) {
      footnotes.push_back(std::string(to_string(r.property)) +
                          ": constant series, correlation undefined (reported as 0)");
    } else if (r.property == Property::kElasticity) {
      footnotes.push_back("elasticity reported as |rho|; raw rho = " + format_rho(r.rho));
    }
    if (r.method == PValueMethod::kMonteCarlo && r.seed) {
      footnotes.push_back(std::string(to_string(r.property)) +
                          ": Monte-Carlo p-value, seed " + std::to_string(*r.seed));
    }
  }
  if (!footnotes.empty() || !report.notes.empty()) out << '\n';
  for (const auto& f : footnotes) out << "* " << f << '\n';
  for (const auto& n : report.notes) out << "note: " << n << '\n';
  return out.str();
}

std::string render_csv(const CorrelationReport& report) {
  std::ostringstream out;
  for (std::size_t i = 0; i < kCsvHeader.size(); ++i) out << (i ? "," : "") << kCsvHeader[i];
  out << '\n';
  for (const auto& r : report.results) {
    out << csv_cell(report.dataset_id) << ',' << csv_cell(report.model_id) << ','
        << to_string(r.property) << ',' << full_precision(r.rho) << ','
        << full_precision(r.rho_reported) << ',' << full_precision(r.p_value) << ','
        << r.n << ',' << to_string(r.method) << ','
        << (r.seed ? std::to_string(*r.seed) : std::string()) << ','
        << full_precision(r.t_approx_p) << ',' << full_precision(report.format_compliance)
        << ',' << (r.degenerate ? "degenerate" : "ok") << '\n';
  }
  return out.str();
}

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

std::string render_json(const CorrelationReport& report) {
  nlohmann::ordered_json doc;
  doc["dataset"] = report.dataset_id;
  doc["model"] = report.model_id;
  doc["format_compliance"] = report.format_compliance;
  doc["results"] = nlohmann::ordered_json::array();
  for (const auto& r : report.results) {
    nlohmann::ordered_json row;
    row["property"] = std::string(to_string(r.property));
    row["rho"] = r.rho;
    row["rho_reported"] = r.rho_reported;
    row["p_value"] = r.p_value;
    row["n"] = r.n;
    row["method"] = std::string(to_string(r.method));
    row["seed"] = r.seed ? nlohmann::ordered_json(*r.seed) : nlohmann::ordered_json(nullptr);
    row["t_approx_p"] = finite_or_null(r.t_approx_p);
    row["degenerate"] = r.degenerate;
    doc["results"].push_back(std::move(row));
  }
  doc["notes"] = report.notes;
  return doc.dump(2) + "\n";
}

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  if (quoted) fail(ErrorKind::kParse, "line " + std::to_string(line_no) + ": unterminated quote");
  cells.push_back(std::move(cell));
  return cells;
}

double csv_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::kParse, "line " + std::to_string(line_no) + ": bad number '" + s + "'");
}

}  // namespace

std::string render_report(const CorrelationReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kText: return render_text(report);
    case ReportFormat::kCsv: return render_csv(report);
    case ReportFormat::kJson: return render_json(report);
  }
  return {};
}

CorrelationReport parse_report_csv(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t line_no = 0;
  CorrelationReport report;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line, line_no);
    if (!header_seen) {
      if (cells.size() != 12 || cells[0] != "dataset") {
        fail(ErrorKind::kParse, "line 1: unexpected report header");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != 12) {
      fail(ErrorKind::kParse, "line " + std::to_string(line_no) + ": expected 12 cells");
    }
    report.dataset_id = cells[0];
    report.model_id = cells[1];
    CorrelationResult r;
    r.property = parse_property(cells[2]);
    r.rho = csv_double(cells[3], line_no);
    r.rho_reported = csv_double(cells[4], line_no);
    r.p_value = csv_double(cells[5], line_no);
    r.n = static_cast<std::size_t>(std::stoull(cells[6]));
    r.method = parse_p_value_method(cells[7]);
    if (!cells[8].empty()) r.seed = std::stoull(cells[8]);
    r.t_approx_p = csv_double(cells[9], line_no);
    report.format_compliance = csv_double(cells[10], line_no);
    r.degenerate = cells[11] == "degenerate";
    report.results.push_back(r);
  }
  if (!header_seen) fail(ErrorKind::kParse, "empty report");
  return report;
}

}  // namespace vital
