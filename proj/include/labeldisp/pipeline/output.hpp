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

// On-disk layout of task outputs under the run's output directory:
//
//   task1/                         one report directory
//   task2/<pixel|shape>/p10/ ...   one per percentage
//   task3/<mask name>/ or task3/all/
//   task4/
//   task5/noise.emb(.ids), loss_trace.tsv, train.json
//   task5_eval/report.json, without/, with/
//
// A report directory holds rows.tsv, report.json, predictions.tsv,
// charts/class_<gt>.svg and, when enabled, similarities.tsv.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "labeldisp/analytics/report.hpp"
#include "labeldisp/core/digest.hpp"
#include "labeldisp/core/files.hpp"
#include "labeldisp/noise/dictionary_io.hpp"
#include "labeldisp/pipeline/tasks.hpp"

namespace labeldisp {

inline constexpr std::string_view kTask5EvalFormat = "labeldisp.task5-eval/1";

namespace detail {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline nlohmann::json split_to_json(const FrameSplit& s) {
  return {{"train", s.train}, {"eval", s.eval}};
}

}  // namespace detail

inline std::string render_predictions(const TaskReport& report) {
  std::string out = "frame_id\tground_truth\tpredicted\tconfidence\ttag\n";
  for (const auto& r : report.records) {
    out += r.frame_id + "\t" + std::to_string(r.ground_truth) + "\t" + std::to_string(r.predicted) +
           "\t" + detail::format_g17(r.confidence) + "\t" + r.perturbation_tag + "\n";
  }
  return out;
}

inline std::string render_similarities(const TaskReport& report,
                                       const std::vector<ClassIndex>& candidates) {
  std::string out = "frame_id\ttag";
  for (ClassIndex c : candidates) out += "\t" + std::to_string(c);
  out += "\n";
  for (const auto& row : report.similarities) {
    out += row.frame_id + "\t" + row.tag;
    for (double s : row.similarities) out += "\t" + detail::format_g17(s);
    out += "\n";
  }
  return out;
}

/// Writes one report directory and returns the structured JSON it contains.
inline nlohmann::json write_task_report(const std::filesystem::path& dir, const TaskReport& report,
                                        Pipeline& pipeline) {
  const auto& catalog = pipeline.manifest().catalog;
  auto metadata = pipeline.run_metadata();
  metadata["tag"] = report.tag;
  write_file_bytes(dir / "rows.tsv", render_report(report.histograms, report.metrics,
                                                   ReportFormat::rows, catalog));
  auto doc = structured_report(report.histograms, report.metrics, catalog, metadata);
  write_file_bytes(dir / "report.json", doc.dump(2) + "\n");
  write_file_bytes(dir / "predictions.tsv", render_predictions(report));
  for (const auto& h : report.histograms) {
    write_file_bytes(dir / "charts" / ("class_" + std::to_string(h.ground_truth) + ".svg"),
                     render_chart(h, catalog));
  }
  if (!report.similarities.empty()) {
    write_file_bytes(dir / "similarities.tsv",
                     render_similarities(report, pipeline.candidate_classes()));
  }
  return doc;
}

inline nlohmann::json deltas_to_json(const std::vector<ClassDelta>& deltas) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& d : deltas) {
    out.push_back({{"ground_truth", d.ground_truth},
                   {"distinct_labels", d.distinct_labels},
                   {"dominant_fraction", d.dominant_fraction},
                   {"entropy_bits", d.entropy_bits}});
  }
  return out;
}

/// What a task run produced: the report directories written and their rows,
/// for display.
struct RunSummary {
  std::vector<std::filesystem::path> outputs;
  std::string text;
};

namespace detail {

inline void summarize(RunSummary& s, const std::filesystem::path& dir, const TaskReport& r,
                      const ClassCatalog& catalog) {
  s.outputs.push_back(dir);
  s.text += "# " + r.tag + "\n";
  s.text += render_report(r.histograms, r.metrics, ReportFormat::rows, catalog);
}

}  // namespace detail

/// Runs the configured task and writes its outputs under config.output_dir.
/// Evaluation reads the dictionary from `dictionary_path`.
inline RunSummary run_configured_task(Pipeline& pipeline,
                                      const std::optional<std::filesystem::path>& dictionary_path = {}) {
  const auto& cfg = pipeline.config();
  const auto& catalog = pipeline.manifest().catalog;
  const auto out = cfg.output_dir;
  RunSummary summary;
  switch (cfg.task) {
    case TaskKind::task1: {
      const auto r = pipeline.run_task1();
      write_task_report(out / "task1", r, pipeline);
      detail::summarize(summary, out / "task1", r, catalog);
      break;
    }
    case TaskKind::task2: {
      for (const auto& r : pipeline.run_task2()) {
        const auto dir = out / "task2" / short_name(cfg.strategy) / r.tag;
        write_task_report(dir, r, pipeline);
        detail::summarize(summary, dir, r, catalog);
      }
      break;
    }
    case TaskKind::task3: {
      for (const auto& r : pipeline.run_task3()) {
        const auto dir = out / "task3" / r.tag.substr(r.tag.find('/') + 1);
        write_task_report(dir, r, pipeline);
        detail::summarize(summary, dir, r, catalog);
      }
      break;
    }
    case TaskKind::task4: {
      const auto r = pipeline.run_task4();
      write_task_report(out / "task4", r, pipeline);
      detail::summarize(summary, out / "task4", r, catalog);
      break;
    }
    case TaskKind::task5_train: {
      const auto result = pipeline.run_task5_train();
      const auto dir = out / "task5";
      write_noise_dictionary(dir / "noise.emb", result.dictionary, result.triplet);
      std::string trace = "epoch\tmean_loss\n";
      for (std::size_t i = 0; i < result.loss_trace.size(); ++i) {
        trace += std::to_string(i + 1) + "\t" + detail::format_g17(result.loss_trace[i]) + "\n";
      }
      write_file_bytes(dir / "loss_trace.tsv", trace);
      nlohmann::json doc = {{"metadata", pipeline.run_metadata()},
                            {"loss_trace", result.loss_trace},
                            {"split", detail::split_to_json(result.split)},
                            {"dictionary", {{"path", "noise.emb"},
                                            {"sha256", sha256_file(dir / "noise.emb")},
                                            {"classes", result.dictionary.size()},
                                            {"dim", result.dictionary.dim()}}}};
      write_file_bytes(dir / "train.json", doc.dump(2) + "\n");
      summary.outputs.push_back(dir);
      summary.text += "# task5 train: " + std::to_string(result.dictionary.size()) +
                      " classes, final mean loss " +
                      detail::format_g17(result.loss_trace.back()) + "\n";
      break;
    }
    case TaskKind::task5_eval: {
      detail::require(dictionary_path.has_value(), ErrorCode::invalid_argument,
                      "task5 eval needs a noise dictionary path");
      const auto loaded = read_noise_dictionary(*dictionary_path);
      const auto result = pipeline.run_task5_eval(loaded.dictionary);
      const auto dir = out / "task5_eval";
      const auto without = write_task_report(dir / "without", result.without_noise, pipeline);
      const auto with = write_task_report(dir / "with", result.with_noise, pipeline);
      auto metadata = pipeline.run_metadata();
      metadata["dictionary"] = {{"path", dictionary_path->string()},
                                {"sha256", sha256_file(*dictionary_path)},
                                {"provenance", loaded.provenance}};
      nlohmann::json doc = {{"format", kTask5EvalFormat},
                            {"metadata", metadata},
                            {"split", detail::split_to_json(result.split)},
                            {"without", without},
                            {"with", with},
                            {"deltas", deltas_to_json(result.deltas)}};
      write_file_bytes(dir / "report.json", doc.dump(2) + "\n");
      detail::summarize(summary, dir / "without", result.without_noise, catalog);
      detail::summarize(summary, dir / "with", result.with_noise, catalog);
      break;
    }
  }
  return summary;
}

}  // namespace labeldisp
