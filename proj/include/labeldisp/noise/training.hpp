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

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "labeldisp/analytics/histogram.hpp"
#include "labeldisp/core/error.hpp"
#include "labeldisp/core/rng.hpp"
#include "labeldisp/noise/noise.hpp"

namespace labeldisp {

/// Per-class frequency histograms used for hard-negative mining.
using ConfusionMap = std::map<ClassIndex, FrequencyHistogram>;

namespace detail {

inline void check_trainable(const FeatureStore& store) {
  require(!store.empty(), ErrorCode::invalid_argument, "feature store is empty");
  require(store.num_classes() >= 2, ErrorCode::invalid_argument,
          "no negative class available: feature store has a single class");
  for (ClassIndex c : store.classes()) {
    require(store.features(c).size() >= 2, ErrorCode::invalid_argument,
            "class " + std::to_string(c) + " has fewer than 2 feature vectors");
  }
}

inline ClassIndex draw_negative_class(ClassIndex c, const std::vector<ClassIndex>& classes,
                                      const ConfusionMap* confusions, Rng& rng) {
  std::vector<ClassIndex> others;
  std::vector<double> weights;
  double total = 0.0;
  const FrequencyHistogram* hist = nullptr;
  if (confusions != nullptr) {
    const auto it = confusions->find(c);
    if (it != confusions->end()) hist = &it->second;
  }
  for (ClassIndex o : classes) {
    if (o == c) continue;
    others.push_back(o);
    double w = 0.0;
    if (hist != nullptr) {
      if (const auto* e = hist->find(o)) w = static_cast<double>(e->count);
    }
    weights.push_back(w);
    total += w;
  }
  if (total <= 0.0) return others[static_cast<std::size_t>(rng.below(others.size()))];
  // Confusion-weighted draw: classes this one is mistaken for more often are
  // chosen more often.
  const double u = rng.unit() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < others.size(); ++i) {
    acc += weights[i];
    if (u < acc && weights[i] > 0.0) return others[i];
  }
  for (std::size_t i = others.size(); i-- > 0;) {
    if (weights[i] > 0.0) return others[i];
  }
  return others.back();
}

}  // namespace detail

/// Draws `count_per_class` triplets for every class, in ascending class order,
/// continuing the stream of `rng`.
inline std::vector<Triplet> mine_triplets(const FeatureStore& store,
                                          const ConfusionMap* confusions,
                                          std::size_t count_per_class, Rng& rng) {
  detail::check_trainable(store);
  const auto classes = store.classes();
  std::vector<Triplet> out;
  out.reserve(classes.size() * count_per_class);
  for (ClassIndex c : classes) {
    const std::size_t n = store.features(c).size();
    for (std::size_t k = 0; k < count_per_class; ++k) {
      const auto pair = rng.sample_without_replacement(n, 2);
      const ClassIndex neg = detail::draw_negative_class(c, classes, confusions, rng);
      const auto neg_idx = static_cast<std::size_t>(rng.below(store.features(neg).size()));
      out.push_back({c, pair[0], pair[1], neg, neg_idx});
    }
  }
  return out;
}

inline std::vector<Triplet> mine_triplets(const FeatureStore& store,
                                          const ConfusionMap* confusions,
                                          std::size_t count_per_class, std::uint64_t seed) {
  Rng rng(seed);
  return mine_triplets(store, confusions, count_per_class, rng);
}

inline double mean_triplet_loss(std::span<const Triplet> triplets, const FeatureStore& store,
                                const NoiseDictionary& noise, double margin) {
  if (triplets.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& t : triplets) sum += augmented_triplet_loss(t, store, noise, margin);
  return sum / static_cast<double>(triplets.size());
}

struct NoiseTrainingResult {
  NoiseDictionary dictionary;
  /// Mean augmented loss over each epoch's triplets, measured after the
  /// epoch's updates.
  std::vector<double> loss_trace;
};

/// Learns one noise vector per class by per-triplet gradient descent on the
/// augmented triplet loss. Noise starts uniform in
/// [-noise_init_scale, noise_init_scale]; the same seed yields the same
/// dictionary and trace.
inline NoiseTrainingResult train_noise_dictionary(const FeatureStore& store,
                                                  const TripletConfig& cfg,
                                                  const ConfusionMap* confusions = nullptr) {
  cfg.validate();
  detail::check_trainable(store);

  Rng rng(cfg.seed);
  NoiseDictionary noise(store.dim());
  for (ClassIndex c : store.classes()) {
    std::vector<double> init(store.dim());
    for (double& v : init) v = rng.uniform(-cfg.noise_init_scale, cfg.noise_init_scale);
    noise.set(c, EmbeddingVector(std::move(init)));
  }

  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(cfg.epochs));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto triplets = mine_triplets(
        store, confusions, static_cast<std::size_t>(cfg.triplets_per_class_per_epoch), rng);
    for (const auto& t : triplets) {
      const auto grad = noise_gradient(t, store, noise, cfg.margin);
      noise.at(t.anchor_class).add_scaled(grad.anchor_class, -cfg.learning_rate);
      noise.at(t.negative_class).add_scaled(grad.negative_class, -cfg.learning_rate);
    }
    trace.push_back(mean_triplet_loss(triplets, store, noise, cfg.margin));
  }
  return {std::move(noise), std::move(trace)};
}

}  // namespace labeldisp
