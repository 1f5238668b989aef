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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "labeldisp/analytics/histogram.hpp"
#include "labeldisp/core/digest.hpp"
#include "labeldisp/core/error.hpp"
#include "labeldisp/core/parallel.hpp"
#include "labeldisp/core/rng.hpp"
#include "labeldisp/embedding/embedding.hpp"
#include "labeldisp/masking/maskers.hpp"
#include "labeldisp/masking/png_io.hpp"
#include "labeldisp/noise/noise.hpp"
#include "labeldisp/noise/training.hpp"
#include "labeldisp/pipeline/manifest.hpp"
#include "labeldisp/pipeline/provider.hpp"
#include "labeldisp/pipeline/run_config.hpp"
#include "labeldisp/pipeline/split.hpp"

namespace labeldisp {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Raw candidate scores for one frame, in candidate order.
struct SimilarityRow {
  std::string frame_id;
  std::string tag;
  std::vector<double> similarities;
};

struct TaskReport {
  std::string tag;
  std::vector<PredictionRecord> records;
  std::vector<FrequencyHistogram> histograms;
  std::vector<DispersionMetrics> metrics;
  std::vector<SimilarityRow> similarities;  // filled when similarity logging is on
};

struct Task5TrainResult {
  NoiseDictionary dictionary;
  std::vector<double> loss_trace;
  TripletConfig triplet;
  FrameSplit split;
};

struct ClassDelta {
  ClassIndex ground_truth;
  std::int64_t distinct_labels;
  double dominant_fraction;
  double entropy_bits;
};

struct Task5EvalResult {
  TaskReport without_noise;
  TaskReport with_noise;
  std::vector<ClassDelta> deltas;  // with minus without, per ground truth
  FrameSplit split;
};

/// Binds a manifest and run configuration to the five tasks. Perturbed-frame
/// embeddings come from the manifest's precomputed references when present and
/// from `provider` otherwise.
class Pipeline {
 public:
  Pipeline(DatasetManifest manifest, RunConfig config, EmbeddingProvider* provider = nullptr)
      : manifest_(std::move(manifest)), config_(std::move(config)), provider_(provider) {
    config_.validate();
    if (config_.labels) {
      std::set<ClassIndex> unique(config_.labels->begin(), config_.labels->end());
      detail::require(unique.size() == config_.labels->size(), ErrorCode::invalid_argument,
                      "label subset lists a class twice");
      detail::require(unique.size() >= 2, ErrorCode::invalid_argument,
                      "label subset needs at least 2 classes");
      for (ClassIndex c : unique) {
        detail::require(manifest_.catalog.contains(c), ErrorCode::invalid_argument,
                        "label subset class " + std::to_string(c) + " outside the catalog");
      }
    }
  }

  const DatasetManifest& manifest() const noexcept { return manifest_; }
  const RunConfig& config() const noexcept { return config_; }

  /// Candidate class indices: the label subset, or the whole catalog.
  std::vector<ClassIndex> candidate_classes() const {
    if (config_.labels) {
      std::vector<ClassIndex> out(*config_.labels);
      std::sort(out.begin(), out.end());
      return out;
    }
    std::vector<ClassIndex> out;
    for (std::size_t i = 1; i <= manifest_.catalog.size(); ++i) {
      out.push_back(static_cast<ClassIndex>(i));
    }
    return out;
  }

  /// Prompt embeddings of the candidate classes, ascending by class.
  const std::vector<LabeledEmbedding>& candidates() {
    if (!candidates_.empty()) return candidates_;
    detail::require(manifest_.text_embeddings.has_value(), ErrorCode::invalid_argument,
                    "manifest has no text_embeddings");
    const auto& table = cache_.table(*manifest_.text_embeddings);
    std::vector<std::string> missing;
    for (ClassIndex c : candidate_classes()) {
      const auto* row = table.find(std::to_string(c));
      if (row == nullptr) {
        missing.push_back(std::to_string(c));
        continue;
      }
      candidates_.push_back({c, *row});
    }
    if (!missing.empty()) {
      candidates_.clear();
      detail::fail(ErrorCode::invalid_argument,
                   "no text embedding for classes: " + join(missing));
    }
    return candidates_;
  }

  TaskReport run_task1() {
    const auto frames = all_frames();
    return classify(frames, original_embeddings(frames), "original");
  }

  /// One report per configured percentage, tagged "p10", "p30", ...
  std::vector<TaskReport> run_task2() {
    const auto frames = all_frames();
    std::vector<TaskReport> out;
    for (double percent : config_.percents) {
      const auto tag = percent_tag(percent);
      const auto key = std::string(short_name(config_.strategy)) + "/" + tag;
      const double p = percent / 100.0;
      auto embeddings = perturbed_embeddings(frames, key, [&](const FrameEntry& f) {
        const auto image = read_frame_png(*f.image);
        const auto seed = derive_seed(config_.effective_mask_seed(), f.id + "|" + key);
        if (config_.strategy == MaskStrategy::random_pixel) {
          return mask_random_pixels(image, p, seed);
        }
        return mask_random_shapes(image, p, seed, config_.shape).frame;
      });
      out.push_back(classify(frames, embeddings, tag));
    }
    return out;
  }

  /// One report per feature mask name, or a single union report.
  std::vector<TaskReport> run_task3() {
    const auto frames = all_frames();
    std::vector<std::string> lacking;
    std::set<std::string> names;
    for (const auto* f : frames) {
      const auto features = f->feature_mask_names();
      if (features.empty()) lacking.push_back(f->id);
      names.insert(features.begin(), features.end());
    }
    if (!lacking.empty()) {
      detail::fail(ErrorCode::invalid_argument, "frames without feature masks: " + join(lacking));
    }

    std::vector<TaskReport> out;
    if (config_.feature_mode == FeatureMode::all_together) {
      const std::string key = "feature/all";
      auto embeddings = perturbed_embeddings(frames, key, [](const FrameEntry& f) {
        std::vector<SegmentationMask> masks;
        for (const auto& name : f.feature_mask_names()) masks.push_back(read_mask_png(f.masks.at(name)));
        return apply_feature_mask(read_frame_png(*f.image), masks);
      });
      out.push_back(classify(frames, embeddings, key));
      return out;
    }
    for (const auto& name : names) {
      std::vector<const FrameEntry*> subset;
      for (const auto* f : frames) {
        if (f->masks.count(name) != 0) subset.push_back(f);
      }
      const auto key = "feature/" + name;
      auto embeddings = perturbed_embeddings(subset, key, [&](const FrameEntry& f) {
        const SegmentationMask mask = read_mask_png(f.masks.at(name));
        return apply_feature_mask(read_frame_png(*f.image), std::span(&mask, 1));
      });
      out.push_back(classify(subset, embeddings, key));
    }
    return out;
  }

  TaskReport run_task4() {
    const auto frames = all_frames();
    std::vector<std::string> lacking;
    for (const auto* f : frames) {
      if (f->masks.count(std::string(kKeepMaskName)) == 0) lacking.push_back(f->id);
    }
    if (!lacking.empty()) {
      detail::fail(ErrorCode::invalid_argument, "frames without a keep mask: " + join(lacking));
    }
    const std::string key = "isolation/keep";
    auto embeddings = perturbed_embeddings(frames, key, [](const FrameEntry& f) {
      return apply_isolation_mask(read_frame_png(*f.image),
                                  read_mask_png(f.masks.at(std::string(kKeepMaskName))));
    });
    return classify(frames, embeddings, key);
  }

  FrameSplit split() const {
    return split_frames(manifest_.frames, config_.seed, config_.train_fraction);
  }

  /// Learns the noise dictionary on the train split. With hard negatives on,
  /// negatives are drawn in proportion to the baseline confusions observed on
  /// the train split.
  Task5TrainResult run_task5_train() {
    auto parts = split();
    const auto frames = frames_by_id(parts.train);
    const auto embeddings = original_embeddings(frames);
    FeatureStore store;
    for (std::size_t i = 0; i < frames.size(); ++i) store.add(frames[i]->class_index, embeddings[i]);

    ConfusionMap confusions;
    if (config_.hard_negatives) {
      const auto baseline = classify(frames, embeddings, "train/baseline");
      for (const auto& h : baseline.histograms) confusions.emplace(h.ground_truth, h);
    }
    const auto triplet = config_.effective_triplet();
    auto trained =
        train_noise_dictionary(store, triplet, config_.hard_negatives ? &confusions : nullptr);
    return {std::move(trained.dictionary), std::move(trained.loss_trace), triplet, std::move(parts)};
  }

  /// Baseline and noise-aware classification of the held-out split. Candidate
  /// classes absent from the dictionary get zero noise.
  Task5EvalResult run_task5_eval(const NoiseDictionary& dictionary) {
    auto parts = split();
    detail::require(!parts.eval.empty(), ErrorCode::invalid_argument,
                    "held-out split is empty; every class needs at least 2 frames");
    const auto frames = frames_by_id(parts.eval);
    const auto embeddings = original_embeddings(frames);
    detail::require(dictionary.dim() == embeddings.front().dim(), ErrorCode::dimension_mismatch,
                    "noise dictionary dim " + std::to_string(dictionary.dim()) +
                        " != embedding dim " + std::to_string(embeddings.front().dim()));
    NoiseDictionary padded = dictionary;
    for (const auto& t : candidates()) {
      if (!padded.contains(t.class_index)) {
        padded.set(t.class_index, EmbeddingVector::zeros(dictionary.dim()));
      }
    }

    Task5EvalResult out;
    out.without_noise = classify(frames, embeddings, "without_noise");
    out.with_noise = classify(frames, embeddings, "with_noise", &padded);
    for (std::size_t i = 0; i < out.without_noise.histograms.size(); ++i) {
      const auto& a = out.without_noise.metrics[i];
      const auto& b = out.with_noise.metrics[i];
      out.deltas.push_back({out.without_noise.histograms[i].ground_truth,
                            static_cast<std::int64_t>(b.distinct_labels) -
                                static_cast<std::int64_t>(a.distinct_labels),
                            b.dominant_fraction - a.dominant_fraction,
                            b.entropy_bits - a.entropy_bits});
    }
    out.split = std::move(parts);
    return out;
  }

  /// Everything needed to reproduce the run: the effective configuration with
  /// all seeds, the prompts, and SHA-256 digests of every input file.
  nlohmann::json run_metadata() {
    if (!metadata_.is_null()) return metadata_;
    nlohmann::json files = nlohmann::json::object();
    const auto base = manifest_.source ? manifest_.source->parent_path() : std::filesystem::path{};
    auto label = [&](const std::filesystem::path& p) {
      return base.empty() ? p.generic_string() : p.lexically_relative(base).generic_string();
    };
    for (const auto& p : manifest_.referenced_files()) {
      if (std::filesystem::exists(p)) files[label(p)] = sha256_file(p);
    }
    nlohmann::json prompts = nlohmann::json::object();
    for (ClassIndex c : candidate_classes()) prompts[std::to_string(c)] = manifest_.prompt_for(c);

    metadata_ = {{"tool", "labeldisp"},
                 {"version", kToolVersion},
                 {"config", config_.to_json()},
                 {"prompt_template", manifest_.prompt_template},
                 {"prompts", std::move(prompts)},
                 {"files", std::move(files)}};
    if (manifest_.source) {
      metadata_["manifest"] = {{"path", manifest_.source->string()},
                               {"sha256", sha256_file(*manifest_.source)}};
    }
    return metadata_;
  }

  /// Classifies frames with their embeddings and aggregates the predictions.
  TaskReport classify(const std::vector<const FrameEntry*>& frames,
                      const std::vector<EmbeddingVector>& embeddings, const std::string& tag,
                      const NoiseDictionary* noise = nullptr) {
    detail::require(frames.size() == embeddings.size(), ErrorCode::invalid_argument,
                    "frame and embedding counts differ");
    const auto& texts = candidates();
    TaskReport report;
    report.tag = tag;
    report.records.resize(frames.size());
    std::vector<std::vector<double>> sims(config_.log_similarities ? frames.size() : 0);
    parallel_for(frames.size(), [&](std::size_t i) {
      const auto& image = embeddings[i];
      const auto result = noise != nullptr
                              ? noise_aware_classify(image, texts, *noise, config_.classifier)
                              : zero_shot_classify(image, texts, config_.classifier);
      report.records[i] = {frames[i]->id, frames[i]->class_index, result.predicted,
                           result.confidence, tag};
      if (config_.log_similarities) {
        for (const auto& t : texts) {
          const auto shifted = noise != nullptr ? image + noise->at(t.class_index) : image;
          sims[i].push_back(cosine_similarity(shifted, t.embedding));
        }
      }
    });
    HistogramAccumulator acc;
    acc.add(report.records);
    report.histograms = acc.histograms();
    for (const auto& h : report.histograms) report.metrics.push_back(dispersion_metrics(h));
    for (std::size_t i = 0; i < sims.size(); ++i) {
      report.similarities.push_back({frames[i]->id, tag, std::move(sims[i])});
    }
    return report;
  }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
    return out;
  }

  std::vector<const FrameEntry*> all_frames() const {
    detail::require(!manifest_.frames.empty(), ErrorCode::invalid_argument, "manifest has no frames");
    std::vector<const FrameEntry*> out;
    for (const auto& f : manifest_.frames) out.push_back(&f);
    return out;
  }

  std::vector<const FrameEntry*> frames_by_id(const std::vector<std::string>& ids) const {
    detail::require(!ids.empty(), ErrorCode::invalid_argument, "no frames selected");
    std::map<std::string, const FrameEntry*> index;
    for (const auto& f : manifest_.frames) index.emplace(f.id, &f);
    std::vector<const FrameEntry*> out;
    for (const auto& id : ids) out.push_back(index.at(id));
    return out;
  }

  std::vector<EmbeddingVector> original_embeddings(const std::vector<const FrameEntry*>& frames) {
    std::vector<std::string> missing;
    for (const auto* f : frames) {
      if (!f->embedding) missing.push_back(f->id);
    }
    if (!missing.empty()) {
      detail::fail(ErrorCode::invalid_argument, "frames without embeddings: " + join(missing));
    }
    std::vector<EmbeddingVector> out;
    out.reserve(frames.size());
    for (const auto* f : frames) out.push_back(cache_.lookup(*f->embedding));
    return out;
  }

  // Precomputed reference when the manifest has one for `key`; otherwise the
  // frame is perturbed here and sent to the provider in one batch.
  std::vector<EmbeddingVector> perturbed_embeddings(
      const std::vector<const FrameEntry*>& frames, const std::string& key,
      const std::function<ImageFrame(const FrameEntry&)>& perturb) {
    std::vector<std::optional<EmbeddingVector>> slots(frames.size());
    std::vector<std::size_t> pending;
    std::vector<std::string> unusable;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const auto it = frames[i]->perturbed.find(key);
      if (it != frames[i]->perturbed.end()) {
        slots[i] = cache_.lookup(it->second);
      } else if (frames[i]->image && provider_ != nullptr) {
        pending.push_back(i);
      } else {
        unusable.push_back(frames[i]->id);
      }
    }
    if (!unusable.empty()) {
      detail::fail(ErrorCode::invalid_argument,
                   "no precomputed '" + key + "' embedding and no image with a provider for: " +
                       join(unusable));
    }
    if (!pending.empty()) {
      std::vector<std::optional<ImageFrame>> images(pending.size());
      parallel_for(pending.size(), [&](std::size_t j) { images[j] = perturb(*frames[pending[j]]); });
      std::vector<EmbeddingRequest> requests;
      requests.reserve(pending.size());
      for (std::size_t j = 0; j < pending.size(); ++j) {
        requests.push_back({frames[pending[j]]->id + "@" + key, std::move(*images[j])});
      }
      auto embedded = provider_->embed(requests);
      detail::require(embedded.size() == requests.size(), ErrorCode::provider,
                      "provider returned " + std::to_string(embedded.size()) + " embeddings for " +
                          std::to_string(requests.size()) + " frames");
      for (std::size_t j = 0; j < pending.size(); ++j) slots[pending[j]] = std::move(embedded[j]);
    }
    std::vector<EmbeddingVector> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
  }

  DatasetManifest manifest_;
  RunConfig config_;
  EmbeddingProvider* provider_;
  EmbeddingCache cache_;
  std::vector<LabeledEmbedding> candidates_;
  nlohmann::json metadata_;
};

}  // namespace labeldisp
