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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "labeldisp/core/error.hpp"
#include "labeldisp/embedding/embedding.hpp"

namespace labeldisp {

struct HistogramEntry {
  ClassIndex predicted;
  std::uint64_t count;
  double mean_confidence;

  friend bool operator==(const HistogramEntry&, const HistogramEntry&) = default;
};

/// Frequency histogram of predicted labels for one ground-truth class.
/// Entries are ordered by count (descending), then predicted index (ascending).
struct FrequencyHistogram {
  ClassIndex ground_truth = 0;
  std::vector<HistogramEntry> entries;

  std::uint64_t total() const {
    std::uint64_t n = 0;
    for (const auto& e : entries) n += e.count;
    return n;
  }

  const HistogramEntry* find(ClassIndex predicted) const {
    for (const auto& e : entries) {
      if (e.predicted == predicted) return &e;
    }
    return nullptr;
  }

  friend bool operator==(const FrequencyHistogram&, const FrequencyHistogram&) = default;
};

struct DispersionMetrics {
  std::size_t distinct_labels = 0;
  double dominant_fraction = 0.0;
  double entropy_bits = 0.0;
  /// 1-based position of the ground truth among the entries, if predicted at all.
  std::optional<std::size_t> ground_truth_rank;

  friend bool operator==(const DispersionMetrics&, const DispersionMetrics&) = default;
};

/// Shardable tally of prediction records across any number of ground-truth
/// classes. Confidences are kept per (ground truth, predicted) cell and summed
/// in sorted order at finalization, so the result is bit-identical regardless
/// of record order or how the input was split across shards.
class HistogramAccumulator {
 public:
  void add(const PredictionRecord& record) {
    detail::require(record.confidence >= 0.0 && record.confidence <= 1.0,
                    ErrorCode::invalid_argument,
                    "confidence outside [0, 1] for frame " + record.frame_id);
    cells_[record.ground_truth][record.predicted].push_back(record.confidence);
  }

  void add(std::span<const PredictionRecord> records) {
    for (const auto& r : records) add(r);
  }

  void merge(const HistogramAccumulator& other) {
    for (const auto& [gt, row] : other.cells_) {
      for (const auto& [pred, confs] : row) {
        auto& dst = cells_[gt][pred];
        dst.insert(dst.end(), confs.begin(), confs.end());
      }
    }
  }

  bool empty() const noexcept { return cells_.empty(); }

  std::vector<ClassIndex> ground_truths() const {
    std::vector<ClassIndex> out;
    for (const auto& [gt, row] : cells_) out.push_back(gt);
    return out;
  }

  FrequencyHistogram histogram(ClassIndex ground_truth) const {
    const auto it = cells_.find(ground_truth);
    detail::require(it != cells_.end(), ErrorCode::invalid_argument,
                    "no records for ground truth " + std::to_string(ground_truth));
    FrequencyHistogram h;
    h.ground_truth = ground_truth;
    for (const auto& [pred, confs] : it->second) {
      std::vector<double> sorted(confs);
      std::sort(sorted.begin(), sorted.end());
      double sum = 0.0;
      for (double c : sorted) sum += c;
      h.entries.push_back({pred, sorted.size(), sum / static_cast<double>(sorted.size())});
    }
    std::stable_sort(h.entries.begin(), h.entries.end(),
                     [](const HistogramEntry& a, const HistogramEntry& b) {
                       if (a.count != b.count) return a.count > b.count;
                       return a.predicted < b.predicted;
                     });
    return h;
  }

  /// One histogram per ground-truth class, ascending by class index.
  std::vector<FrequencyHistogram> histograms() const {
    std::vector<FrequencyHistogram> out;
    for (const auto& [gt, row] : cells_) out.push_back(histogram(gt));
    return out;
  }

 private:
  std::map<ClassIndex, std::map<ClassIndex, std::vector<double>>> cells_;
};

/// Builds the frequency histogram for one ground-truth class.
inline FrequencyHistogram build_fhc(std::span<const PredictionRecord> records,
                                    ClassIndex ground_truth) {
  detail::require(!records.empty(), ErrorCode::invalid_argument,
                  "cannot build a histogram from zero records");
  HistogramAccumulator acc;
  for (const auto& r : records) {
    detail::require(r.ground_truth == ground_truth, ErrorCode::invalid_argument,
                    "record " + r.frame_id + " has ground truth " +
                        std::to_string(r.ground_truth) + ", expected " +
                        std::to_string(ground_truth));
    acc.add(r);
  }
  return acc.histogram(ground_truth);
}

inline DispersionMetrics dispersion_metrics(const FrequencyHistogram& h) {
  detail::require(!h.entries.empty(), ErrorCode::invalid_argument, "histogram has no entries");
  const auto total = static_cast<double>(h.total());
  detail::require(total > 0.0, ErrorCode::invalid_argument, "histogram has zero total count");

  DispersionMetrics m;
  m.distinct_labels = h.entries.size();
  std::uint64_t max_count = 0;
  double entropy = 0.0;
  for (std::size_t i = 0; i < h.entries.size(); ++i) {
    const auto& e = h.entries[i];
    max_count = std::max(max_count, e.count);
    const double q = static_cast<double>(e.count) / total;
    entropy -= q * std::log2(q);
    if (e.predicted == h.ground_truth) m.ground_truth_rank = i + 1;
  }
  m.dominant_fraction = static_cast<double>(max_count) / total;
  // A single label contributes -1 * log2(1) = -0; normalize the sign.
  m.entropy_bits = entropy <= 0.0 ? 0.0 : entropy;
  return m;
}

}  // namespace labeldisp
