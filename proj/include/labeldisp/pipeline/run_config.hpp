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

// Run configuration (JSON). Every key is optional; command-line flags
// override the file.
//
//   {
//     "task": "task2",
//     "seed": 7,
//     "output_dir": "out",
//     "labels": [1, 2, 3],
//     "classifier": {"logit_scale": 100},
//     "mask": {"strategy": "pixel", "percents": [10, 30, 50], "seed": 7,
//              "max_shape_fraction": 0.05, "mode": "one"},
//     "triplet": {"margin": 0.2, "learning_rate": 0.05, "epochs": 20,
//                 "triplets_per_class_per_epoch": 16, "seed": 7,
//                 "noise_init_scale": 0.01, "hard_negatives": true},
//     "split": {"train_fraction": 0.8},
//     "provider": {"request_dir": "exchange", "timeout_seconds": 600,
//                  "poll_interval_ms": 20},
//     "log_similarities": false
//   }

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "labeldisp/core/error.hpp"
#include "labeldisp/core/files.hpp"
#include "labeldisp/embedding/embedding.hpp"
#include "labeldisp/masking/maskers.hpp"
#include "labeldisp/noise/noise.hpp"

namespace labeldisp {

enum class TaskKind { task1, task2, task3, task4, task5_train, task5_eval };
enum class FeatureMode { one_at_a_time, all_together };

inline const char* to_string(TaskKind t) {
  switch (t) {
    case TaskKind::task1: return "task1";
    case TaskKind::task2: return "task2";
    case TaskKind::task3: return "task3";
    case TaskKind::task4: return "task4";
    case TaskKind::task5_train: return "task5-train";
    case TaskKind::task5_eval: return "task5-eval";
  }
  return "unknown";
}

inline TaskKind parse_task_kind(const std::string& s) {
  for (auto t : {TaskKind::task1, TaskKind::task2, TaskKind::task3, TaskKind::task4,
                 TaskKind::task5_train, TaskKind::task5_eval}) {
    if (s == to_string(t)) return t;
  }
  detail::fail(ErrorCode::invalid_argument, "unknown task '" + s + "'");
}

/// Accepts the short CLI spelling ("pixel", "shape") or the full name.
inline MaskStrategy parse_random_strategy(const std::string& s) {
  if (s == "pixel" || s == "random_pixel") return MaskStrategy::random_pixel;
  if (s == "shape" || s == "random_shape") return MaskStrategy::random_shape;
  detail::fail(ErrorCode::invalid_argument,
               "mask strategy must be 'pixel' or 'shape', got '" + s + "'");
}

inline const char* short_name(MaskStrategy s) {
  switch (s) {
    case MaskStrategy::random_pixel: return "pixel";
    case MaskStrategy::random_shape: return "shape";
    case MaskStrategy::feature: return "feature";
    case MaskStrategy::isolation: return "isolation";
  }
  return "unknown";
}

inline FeatureMode parse_feature_mode(const std::string& s) {
  if (s == "one") return FeatureMode::one_at_a_time;
  if (s == "all") return FeatureMode::all_together;
  detail::fail(ErrorCode::invalid_argument, "feature mode must be 'one' or 'all', got '" + s + "'");
}

/// "p10", "p30", "p12.5": the percentage with no trailing zeros.
inline std::string percent_tag(double percent) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", percent);
  return std::string("p") + buf;
}

struct ProviderConfig {
  std::filesystem::path request_dir;
  double timeout_seconds = 600.0;
  int poll_interval_ms = 20;
};

struct RunConfig {
  TaskKind task = TaskKind::task1;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  ClassifierConfig classifier;
  std::optional<std::vector<ClassIndex>> labels;

  MaskStrategy strategy = MaskStrategy::random_pixel;
  std::vector<double> percents{10.0, 30.0, 50.0};
  std::optional<std::uint64_t> mask_seed;
  ShapeMaskOptions shape;
  FeatureMode feature_mode = FeatureMode::one_at_a_time;

  TripletConfig triplet;
  std::optional<std::uint64_t> triplet_seed;
  bool hard_negatives = true;
  double train_fraction = 0.8;

  std::optional<ProviderConfig> provider;
  bool log_similarities = false;

  std::uint64_t effective_mask_seed() const { return mask_seed.value_or(seed); }

  TripletConfig effective_triplet() const {
    TripletConfig t = triplet;
    t.seed = triplet_seed.value_or(seed);
    return t;
  }

  void validate() const {
    classifier.validate();
    triplet.validate();
    detail::require(!percents.empty(), ErrorCode::invalid_argument, "no mask percentages given");
    for (double p : percents) {
      detail::require(std::isfinite(p) && p >= 0.0 && p <= 100.0, ErrorCode::invalid_argument,
                      "mask percentage must lie in [0, 100], got " + std::to_string(p));
    }
    detail::require(strategy == MaskStrategy::random_pixel ||
                        strategy == MaskStrategy::random_shape,
                    ErrorCode::invalid_argument, "random masking strategy must be pixel or shape");
    detail::require(shape.max_shape_fraction > 0.0 && shape.max_shape_fraction <= 1.0,
                    ErrorCode::invalid_argument, "max_shape_fraction must lie in (0, 1]");
    detail::require(train_fraction > 0.0 && train_fraction < 1.0, ErrorCode::invalid_argument,
                    "train_fraction must lie in (0, 1)");
    if (labels) {
      detail::require(!labels->empty(), ErrorCode::invalid_argument, "label subset is empty");
    }
    if (provider) {
      detail::require(provider->timeout_seconds > 0.0 && provider->poll_interval_ms >= 1,
                      ErrorCode::invalid_argument, "provider timeout and poll interval must be positive");
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["task"] = to_string(task);
    j["seed"] = seed;
    j["output_dir"] = output_dir.string();
    j["classifier"] = {{"logit_scale", classifier.logit_scale}};
    j["labels"] = labels ? nlohmann::json(*labels) : nlohmann::json(nullptr);
    j["mask"] = {{"strategy", short_name(strategy)},
                 {"percents", percents},
                 {"seed", effective_mask_seed()},
                 {"max_shape_fraction", shape.max_shape_fraction},
                 {"mode", feature_mode == FeatureMode::one_at_a_time ? "one" : "all"}};
    const auto t = effective_triplet();
    j["triplet"] = {{"margin", t.margin},
                    {"learning_rate", t.learning_rate},
                    {"epochs", t.epochs},
                    {"triplets_per_class_per_epoch", t.triplets_per_class_per_epoch},
                    {"seed", t.seed},
                    {"noise_init_scale", t.noise_init_scale},
                    {"hard_negatives", hard_negatives}};
    j["split"] = {{"train_fraction", train_fraction}};
    if (provider) {
      j["provider"] = {{"request_dir", provider->request_dir.string()},
                       {"timeout_seconds", provider->timeout_seconds},
                       {"poll_interval_ms", provider->poll_interval_ms}};
    } else {
      j["provider"] = nullptr;
    }
    j["log_similarities"] = log_similarities;
    return j;
  }

  /// Overlays the keys present in `j` onto `base`.
  static RunConfig from_json(const nlohmann::json& j) { return from_json(j, RunConfig()); }

  static RunConfig from_json(const nlohmann::json& j, RunConfig base) {
    RunConfig c = std::move(base);
    try {
      if (j.contains("task")) c.task = parse_task_kind(j.at("task").get<std::string>());
      if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
      if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
      if (j.contains("labels") && !j.at("labels").is_null()) {
        c.labels = j.at("labels").get<std::vector<ClassIndex>>();
      }
      if (j.contains("classifier")) {
        c.classifier.logit_scale = j.at("classifier").value("logit_scale", c.classifier.logit_scale);
      }
      if (j.contains("mask")) {
        const auto& m = j.at("mask");
        if (m.contains("strategy")) c.strategy = parse_random_strategy(m.at("strategy").get<std::string>());
        if (m.contains("percents")) c.percents = m.at("percents").get<std::vector<double>>();
        if (m.contains("seed")) c.mask_seed = m.at("seed").get<std::uint64_t>();
        c.shape.max_shape_fraction = m.value("max_shape_fraction", c.shape.max_shape_fraction);
        if (m.contains("mode")) c.feature_mode = parse_feature_mode(m.at("mode").get<std::string>());
      }
      if (j.contains("triplet")) {
        const auto& t = j.at("triplet");
        c.triplet.margin = t.value("margin", c.triplet.margin);
        c.triplet.learning_rate = t.value("learning_rate", c.triplet.learning_rate);
        c.triplet.epochs = t.value("epochs", c.triplet.epochs);
        c.triplet.triplets_per_class_per_epoch =
            t.value("triplets_per_class_per_epoch", c.triplet.triplets_per_class_per_epoch);
        c.triplet.noise_init_scale = t.value("noise_init_scale", c.triplet.noise_init_scale);
        if (t.contains("seed")) c.triplet_seed = t.at("seed").get<std::uint64_t>();
        c.hard_negatives = t.value("hard_negatives", c.hard_negatives);
      }
      if (j.contains("split")) c.train_fraction = j.at("split").value("train_fraction", c.train_fraction);
      if (j.contains("provider") && !j.at("provider").is_null()) {
        const auto& p = j.at("provider");
        ProviderConfig pc = c.provider.value_or(ProviderConfig{});
        if (p.contains("request_dir")) pc.request_dir = p.at("request_dir").get<std::string>();
        pc.timeout_seconds = p.value("timeout_seconds", pc.timeout_seconds);
        pc.poll_interval_ms = p.value("poll_interval_ms", pc.poll_interval_ms);
        detail::require(!pc.request_dir.empty(), ErrorCode::invalid_argument,
                        "provider.request_dir is required");
        c.provider = pc;
      }
      c.log_similarities = j.value("log_similarities", c.log_similarities);
    } catch (const nlohmann::json::exception& e) {
      detail::fail(ErrorCode::invalid_argument, std::string("malformed run config: ") + e.what());
    }
    return c;
  }

  static RunConfig load(const std::filesystem::path& path) { return load(path, RunConfig()); }

  static RunConfig load(const std::filesystem::path& path, RunConfig base) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_file_bytes(path));
    } catch (const nlohmann::json::exception& e) {
      detail::fail(ErrorCode::invalid_argument,
                   "config " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(doc, std::move(base));
  }
};

}  // namespace labeldisp
