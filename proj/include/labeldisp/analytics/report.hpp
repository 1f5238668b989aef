/* Copyright 2026 The labeldisp Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "labeldisp/analytics/histogram.hpp"
#include "labeldisp/core/error.hpp"
#include "labeldisp/embedding/embedding.hpp"

namespace labeldisp {

enum class ReportFormat { rows, structured, chart };

inline constexpr std::string_view kStructuredReportFormat = "labeldisp.report/1";

namespace detail {

inline std::string format_fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline void check_aligned(std::span<const FrequencyHistogram> histograms,
                          std::span<const DispersionMetrics> metrics) {
  require(histograms.size() == metrics.size(), ErrorCode::invalid_argument,
          "report inputs misaligned: " + std::to_string(histograms.size()) + " histograms, " +
              std::to_string(metrics.size()) + " metric sets");
  for (std::size_t i = 0; i < histograms.size(); ++i) {
    require(histograms[i].entries.size() == metrics[i].distinct_labels,
            ErrorCode::invalid_argument,
            "report inputs misaligned at ground truth " +
                std::to_string(histograms[i].ground_truth));
  }
}

}  // namespace detail

/// One tab-separated row: `<gt>\t<name>\t<pred> (<count>, <conf>), ...` with
/// confidences at two decimals.
inline std::string render_row(const FrequencyHistogram& h, const ClassCatalog& catalog) {
  std::string out = std::to_string(h.ground_truth) + "\t" + catalog.name(h.ground_truth) + "\t";
  for (std::size_t i = 0; i < h.entries.size(); ++i) {
    const auto& e = h.entries[i];
    if (i > 0) out += ", ";
    out += std::to_string(e.predicted) + " (" + std::to_string(e.count) + ", " +
           detail::format_fixed2(e.mean_confidence) + ")";
  }
  return out;
}

inline nlohmann::json histogram_to_json(const FrequencyHistogram& h) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : h.entries) {
    entries.push_back({{"predicted", e.predicted},
                       {"count", e.count},
                       {"mean_confidence", e.mean_confidence}});
  }
  return {{"ground_truth", h.ground_truth}, {"entries", std::move(entries)}};
}

inline FrequencyHistogram histogram_from_json(const nlohmann::json& j) {
  FrequencyHistogram h;
  h.ground_truth = j.at("ground_truth").get<ClassIndex>();
  for (const auto& e : j.at("entries")) {
    h.entries.push_back({e.at("predicted").get<ClassIndex>(), e.at("count").get<std::uint64_t>(),
                         e.at("mean_confidence").get<double>()});
  }
  return h;
}

inline nlohmann::json metrics_to_json(const DispersionMetrics& m) {
  nlohmann::json j = {{"distinct_labels", m.distinct_labels},
                      {"dominant_fraction", m.dominant_fraction},
                      {"entropy_bits", m.entropy_bits}};
  j["ground_truth_rank"] =
      m.ground_truth_rank ? nlohmann::json(*m.ground_truth_rank) : nlohmann::json(nullptr);
  return j;
}

inline DispersionMetrics metrics_from_json(const nlohmann::json& j) {
  DispersionMetrics m;
  m.distinct_labels = j.at("distinct_labels").get<std::size_t>();
  m.dominant_fraction = j.at("dominant_fraction").get<double>();
  m.entropy_bits = j.at("entropy_bits").get<double>();
  if (!j.at("ground_truth_rank").is_null()) {
    m.ground_truth_rank = j.at("ground_truth_rank").get<std::size_t>();
  }
  return m;
}

/// Machine-readable report body; doubles are emitted at round-trip precision.
inline nlohmann::json structured_report(std::span<const FrequencyHistogram> histograms,
                                        std::span<const DispersionMetrics> metrics,
                                        const ClassCatalog& catalog,
                                        const nlohmann::json& metadata = nlohmann::json::object()) {
  detail::check_aligned(histograms, metrics);
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t i = 0; i < histograms.size(); ++i) {
    auto entry = histogram_to_json(histograms[i]);
    entry["name"] = catalog.name(histograms[i].ground_truth);
    entry["metrics"] = metrics_to_json(metrics[i]);
    classes.push_back(std::move(entry));
  }
  return {{"format", kStructuredReportFormat},
          {"metadata", metadata},
          {"classes", std::move(classes)}};
}

struct StructuredReport {
  nlohmann::json metadata;
  std::vector<FrequencyHistogram> histograms;
  std::vector<DispersionMetrics> metrics;
};

inline StructuredReport parse_structured_report(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    detail::fail(ErrorCode::format, std::string("structured report is not JSON: ") + e.what());
  }
  detail::require(doc.value("format", "") == kStructuredReportFormat, ErrorCode::format,
                  "not a structured dispersion report");
  StructuredReport out;
  try {
    out.metadata = doc.at("metadata");
    for (const auto& c : doc.at("classes")) {
      out.histograms.push_back(histogram_from_json(c));
      out.metrics.push_back(metrics_from_json(c.at("metrics")));
    }
  } catch (const nlohmann::json::exception& e) {
    detail::fail(ErrorCode::format, std::string("malformed structured report: ") + e.what());
  }
  return out;
}

/// Bar chart of one histogram as a standalone SVG document: one bar per
/// predicted label, height proportional to count, annotated with the mean
/// confidence.
inline std::string render_chart(const FrequencyHistogram& h, const ClassCatalog& catalog) {
  constexpr int kBar = 36, kGap = 12, kLeft = 48, kTop = 40, kPlot = 220, kBottom = 48;
  const int n = static_cast<int>(h.entries.size());
  const int width = std::max(kLeft + n * (kBar + kGap) + kGap, 320);
  const int height = kTop + kPlot + kBottom;
  std::uint64_t max_count = 1;
  for (const auto& e : h.entries) max_count = std::max(max_count, e.count);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "  <title>" << h.ground_truth << ' ' << detail::xml_escape(catalog.name(h.ground_truth))
      << "</title>\n";
  svg << "  <text x=\"" << kLeft << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">"
      << h.ground_truth << ' ' << detail::xml_escape(catalog.name(h.ground_truth))
      << " (n=" << h.total() << ")</text>\n";
  svg << "  <line x1=\"" << kLeft << "\" y1=\"" << kTop + kPlot << "\" x2=\"" << width - kGap
      << "\" y2=\"" << kTop + kPlot << "\" stroke=\"black\"/>\n";
  for (int i = 0; i < n; ++i) {
    const auto& e = h.entries[static_cast<std::size_t>(i)];
    const int bar_h = static_cast<int>(static_cast<double>(kPlot) * static_cast<double>(e.count) /
                                       static_cast<double>(max_count));
    const int x = kLeft + kGap + i * (kBar + kGap);
    const int y = kTop + kPlot - bar_h;
    const char* fill = e.predicted == h.ground_truth ? "#2a9d8f" : "#e76f51";
    svg << "  <g class=\"bar\" data-predicted=\"" << e.predicted << "\" data-count=\"" << e.count
        << "\">\n";
    svg << "    <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kBar << "\" height=\""
        << bar_h << "\" fill=\"" << fill << "\"/>\n";
    svg << "    <text x=\"" << x + kBar / 2 << "\" y=\"" << y - 4
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << e.count
        << " @ " << detail::format_fixed2(e.mean_confidence) << "</text>\n";
    svg << "    <text x=\"" << x + kBar / 2 << "\" y=\"" << kTop + kPlot + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << e.predicted
        << "</text>\n";
    svg << "  </g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

/// Renders aligned histograms and metrics. `rows` yields one line per class;
/// `structured` a JSON document; `chart` the per-class SVG documents
/// concatenated (the pipeline writes them to separate files).
inline std::string render_report(std::span<const FrequencyHistogram> histograms,
                                 std::span<const DispersionMetrics> metrics, ReportFormat format,
                                 const ClassCatalog& catalog,
                                 const nlohmann::json& metadata = nlohmann::json::object()) {
  detail::check_aligned(histograms, metrics);
  switch (format) {
    case ReportFormat::rows: {
      std::string out;
      for (const auto& h : histograms) out += render_row(h, catalog) + "\n";
      return out;
    }
    case ReportFormat::structured:
      return structured_report(histograms, metrics, catalog, metadata).dump(2) + "\n";
    case ReportFormat::chart: {
      std::string out;
      for (const auto& h : histograms) out += render_chart(h, catalog);
      return out;
    }
  }
  return {};
}

/// One parsed table row: `<gt>\t<name>\t<pred> (<count>, <conf>), ...`.
/// Entries stay in source order and confidences keep the printed precision.
struct ParsedRow {
  ClassIndex ground_truth = 0;
  std::string name;
  std::vector<HistogramEntry> entries;
};

inline ParsedRow parse_row(std::string_view line) {
  auto malformed = [&](const std::string& why) {
    detail::fail(ErrorCode::format, "malformed row (" + why + "): " + std::string(line));
  };
  const auto tab1 = line.find('\t');
  const auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
  if (tab2 == std::string_view::npos) malformed("expected three tab-separated fields");

  ParsedRow row;
  try {
    row.ground_truth = std::stoi(std::string(line.substr(0, tab1)));
  } catch (const std::exception&) {
    malformed("ground truth index");
  }
  row.name = std::string(line.substr(tab1 + 1, tab2 - tab1 - 1));

  std::string preds(line.substr(tab2 + 1));
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < preds.size() && (preds[pos] == ' ' || preds[pos] == '\t')) ++pos;
  };
  auto read_number = [&](bool allow_fraction) -> std::string {
    skip_ws();
    const auto start = pos;
    while (pos < preds.size() &&
           (std::isdigit(static_cast<unsigned char>(preds[pos])) || (allow_fraction && preds[pos] == '.'))) {
      ++pos;
    }
    if (start == pos) malformed("expected a number at offset " + std::to_string(start));
    return preds.substr(start, pos - start);
  };
  auto expect = [&](char c) {
    skip_ws();
    if (pos >= preds.size() || preds[pos] != c) {
      malformed(std::string("expected '") + c + "' at offset " + std::to_string(pos));
    }
    ++pos;
  };

  skip_ws();
  while (pos < preds.size()) {
    HistogramEntry e{};
    e.predicted = std::stoi(read_number(false));
    expect('(');
    e.count = std::stoull(read_number(false));
    expect(',');
    e.mean_confidence = std::stod(read_number(true));
    expect(')');
    row.entries.push_back(e);
    skip_ws();
    if (pos < preds.size()) expect(',');
    skip_ws();
  }
  if (row.entries.empty()) malformed("no (count, confidence) pairs");
  return row;
}

}  // namespace labeldisp
