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

// Class-specific noise vectors in embedding space, the noise-augmented
// triplet objective and its analytic gradient, and noise-aware
// classification.
//
// For a triplet (anchor a, positive p from class c; negative n from c') the
// objective is
//
//   max(0, d(f_a + N_c, f_p + N_c) - d(f_a + N_c, f_n + N_c') + margin)
//
// with d the Euclidean distance. Anchor and positive share N_c, so the first
// distance is d(f_a, f_p) whatever the noise.

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "labeldisp/core/error.hpp"
#include "labeldisp/embedding/embedding.hpp"

namespace labeldisp {

/// Extracted features per class.
class FeatureStore {
 public:
  void add(ClassIndex c, EmbeddingVector feature) {
    if (dim_ == 0) dim_ = feature.dim();
    detail::require(feature.dim() == dim_, ErrorCode::dimension_mismatch,
                    "feature dim " + std::to_string(feature.dim()) + " != store dim " +
                        std::to_string(dim_));
    by_class_[c].push_back(std::move(feature));
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_classes() const noexcept { return by_class_.size(); }
  bool empty() const noexcept { return by_class_.empty(); }

  bool contains(ClassIndex c) const { return by_class_.count(c) != 0; }

  const std::vector<EmbeddingVector>& features(ClassIndex c) const {
    const auto it = by_class_.find(c);
    detail::require(it != by_class_.end(), ErrorCode::invalid_argument,
                    "feature store has no class " + std::to_string(c));
    return it->second;
  }

  /// Class indices in ascending order.
  std::vector<ClassIndex> classes() const {
    std::vector<ClassIndex> out;
    out.reserve(by_class_.size());
    for (const auto& [c, v] : by_class_) out.push_back(c);
    return out;
  }

 private:
  std::size_t dim_ = 0;
  std::map<ClassIndex, std::vector<EmbeddingVector>> by_class_;
};

/// Learned noise vector N_c per class.
class NoiseDictionary {
 public:
  NoiseDictionary() = default;
  explicit NoiseDictionary(std::size_t dim) : dim_(dim) {
    detail::require(dim >= 1, ErrorCode::invalid_argument, "noise dim must be >= 1");
  }

  static NoiseDictionary zeros(std::size_t dim, std::span<const ClassIndex> classes) {
    NoiseDictionary d(dim);
    for (ClassIndex c : classes) d.set(c, EmbeddingVector::zeros(dim));
    return d;
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return noise_.size(); }

  void set(ClassIndex c, EmbeddingVector v) {
    detail::require(v.dim() == dim_, ErrorCode::dimension_mismatch,
                    "noise vector dim " + std::to_string(v.dim()) + " != dictionary dim " +
                        std::to_string(dim_));
    noise_.insert_or_assign(c, std::move(v));
  }

  bool contains(ClassIndex c) const { return noise_.count(c) != 0; }

  const EmbeddingVector& at(ClassIndex c) const {
    const auto it = noise_.find(c);
    detail::require(it != noise_.end(), ErrorCode::invalid_argument,
                    "no noise vector for class " + std::to_string(c));
    return it->second;
  }

  EmbeddingVector& at(ClassIndex c) {
    const auto it = noise_.find(c);
    detail::require(it != noise_.end(), ErrorCode::invalid_argument,
                    "no noise vector for class " + std::to_string(c));
    return it->second;
  }

  const std::map<ClassIndex, EmbeddingVector>& entries() const noexcept { return noise_; }

  friend bool operator==(const NoiseDictionary&, const NoiseDictionary&) = default;

 private:
  std::size_t dim_ = 0;
  std::map<ClassIndex, EmbeddingVector> noise_;
};

struct TripletConfig {
  double margin = 0.2;
  double learning_rate = 0.05;
  int epochs = 20;
  int triplets_per_class_per_epoch = 16;
  std::uint64_t seed = 0;
  double noise_init_scale = 0.01;

  void validate() const {
    detail::require(std::isfinite(margin) && margin >= 0.0, ErrorCode::invalid_argument,
                    "margin must be >= 0");
    detail::require(std::isfinite(learning_rate) && learning_rate > 0.0,
                    ErrorCode::invalid_argument, "learning_rate must be positive");
    detail::require(epochs >= 1, ErrorCode::invalid_argument, "epochs must be >= 1");
    detail::require(triplets_per_class_per_epoch >= 1, ErrorCode::invalid_argument,
                    "triplets_per_class_per_epoch must be >= 1");
    detail::require(std::isfinite(noise_init_scale) && noise_init_scale >= 0.0,
                    ErrorCode::invalid_argument, "noise_init_scale must be >= 0");
  }
};

/// Indices into a FeatureStore: anchor and positive are distinct frames of
/// `anchor_class`; negative is a frame of `negative_class`.
struct Triplet {
  ClassIndex anchor_class;
  std::size_t anchor;
  std::size_t positive;
  ClassIndex negative_class;
  std::size_t negative;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

inline double triplet_loss(double d_ap, double d_an, double margin) {
  detail::require(d_ap >= 0.0 && d_an >= 0.0, ErrorCode::invalid_argument,
                  "triplet distances must be non-negative");
  return std::max(0.0, d_ap - d_an + margin);
}

namespace detail {

struct TripletView {
  const EmbeddingVector& anchor;
  const EmbeddingVector& positive;
  const EmbeddingVector& negative;
  const EmbeddingVector& anchor_noise;
  const EmbeddingVector& negative_noise;
};

inline TripletView resolve(const Triplet& t, const FeatureStore& store,
                           const NoiseDictionary& noise) {
  require(t.anchor_class != t.negative_class, ErrorCode::invalid_argument,
          "triplet negative class equals anchor class");
  require(t.anchor != t.positive, ErrorCode::invalid_argument,
          "triplet anchor and positive are the same frame");
  const auto& pos_class = store.features(t.anchor_class);
  const auto& neg_class = store.features(t.negative_class);
  require(t.anchor < pos_class.size() && t.positive < pos_class.size() &&
              t.negative < neg_class.size(),
          ErrorCode::invalid_argument, "triplet references a missing frame");
  require(noise.dim() == store.dim(), ErrorCode::dimension_mismatch,
          "noise dictionary dim does not match feature store dim");
  return {pos_class[t.anchor], pos_class[t.positive], neg_class[t.negative],
          noise.at(t.anchor_class), noise.at(t.negative_class)};
}

// Distances of the augmented triplet: (d(a, p), d(a, n)) with a = f_a + N_c,
// p = f_p + N_c, n = f_n + N_c'.
inline std::pair<double, double> augmented_distances(const TripletView& v) {
  double ap = 0.0;
  double an = 0.0;
  for (std::size_t i = 0; i < v.anchor.dim(); ++i) {
    const double a = v.anchor[i] + v.anchor_noise[i];
    const double p = v.positive[i] + v.anchor_noise[i];
    const double n = v.negative[i] + v.negative_noise[i];
    ap += (a - p) * (a - p);
    an += (a - n) * (a - n);
  }
  return {std::sqrt(ap), std::sqrt(an)};
}

}  // namespace detail

/// Intra-class distance of a triplet after adding the shared class noise.
inline double augmented_intra_distance(const Triplet& t, const FeatureStore& store,
                                       const NoiseDictionary& noise) {
  return detail::augmented_distances(detail::resolve(t, store, noise)).first;
}

inline double augmented_triplet_loss(const Triplet& t, const FeatureStore& store,
                                     const NoiseDictionary& noise, double margin) {
  const auto [d_ap, d_an] = detail::augmented_distances(detail::resolve(t, store, noise));
  return triplet_loss(d_ap, d_an, margin);
}

struct NoiseGradient {
  EmbeddingVector anchor_class;    // d loss / d N_c
  EmbeddingVector negative_class;  // d loss / d N_c'
};

/// Analytic gradient of augmented_triplet_loss with respect to N_c and N_c'.
///
/// With a = f_a + N_c and n = f_n + N_c', the active hinge has gradient
/// -u for N_c and +u for N_c', u = (a - n) / |a - n|. The intra-class term
/// contributes nothing because N_c cancels. On the inactive side, and at the
/// hinge boundary, the subgradient 0 is returned.
inline NoiseGradient noise_gradient(const Triplet& t, const FeatureStore& store,
                                    const NoiseDictionary& noise, double margin) {
  const auto v = detail::resolve(t, store, noise);
  const auto [d_ap, d_an] = detail::augmented_distances(v);
  const std::size_t dim = v.anchor.dim();
  if (triplet_loss(d_ap, d_an, margin) <= 0.0) {
    return {EmbeddingVector::zeros(dim), EmbeddingVector::zeros(dim)};
  }
  detail::require(d_an > 0.0, ErrorCode::degenerate,
                  "anchor and negative coincide; gradient direction undefined");
  std::vector<double> minus_u(dim), plus_u(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double u = ((v.anchor[i] + v.anchor_noise[i]) - (v.negative[i] + v.negative_noise[i])) / d_an;
    minus_u[i] = -u;
    plus_u[i] = u;
  }
  return {EmbeddingVector(std::move(minus_u)), EmbeddingVector(std::move(plus_u))};
}

/// Hypothesis-conditioned classification: candidate c is scored as
/// logit_scale * cos(image + N_c, text_c). With an all-zero dictionary this is
/// exactly zero_shot_classify.
inline Classification noise_aware_classify(const EmbeddingVector& image,
                                           std::span<const LabeledEmbedding> texts,
                                           const NoiseDictionary& noise,
                                           const ClassifierConfig& cfg = {}) {
  cfg.validate();
  detail::check_candidates(texts);
  std::vector<double> sims;
  sims.reserve(texts.size());
  for (const auto& t : texts) {
    detail::require(noise.contains(t.class_index), ErrorCode::invalid_argument,
                    "no noise vector for candidate class " + std::to_string(t.class_index));
    sims.push_back(cosine_similarity(image + noise.at(t.class_index), t.embedding));
  }
  return detail::softmax_classify(texts, sims, cfg);
}

}  // namespace labeldisp
