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
#include <initializer_list>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "labeldisp/core/error.hpp"

namespace labeldisp {

/// 1-based class index into a ClassCatalog.
using ClassIndex = std::int32_t;

/// Dense real vector: an image feature, a prompt embedding, or a class noise
/// vector. Always non-empty and finite.
class EmbeddingVector {
 public:
  explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
    detail::require(!values_.empty(), ErrorCode::invalid_argument,
                    "embedding must have dim >= 1");
    for (double v : values_) {
      detail::require(std::isfinite(v), ErrorCode::invalid_argument,
                      "embedding contains a non-finite value");
    }
  }
  EmbeddingVector(std::initializer_list<double> values)
      : EmbeddingVector(std::vector<double>(values)) {}

  static EmbeddingVector zeros(std::size_t dim) {
    return EmbeddingVector(std::vector<double>(dim, 0.0));
  }

  std::size_t dim() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  double norm() const {
    double sum = 0.0;
    for (double v : values_) sum += v * v;
    return std::sqrt(sum);
  }

  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
  }

  friend EmbeddingVector operator+(const EmbeddingVector& a, const EmbeddingVector& b) {
    check_same_dim(a, b);
    std::vector<double> out(a.dim());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values_[i] + b.values_[i];
    return EmbeddingVector(std::move(out));
  }

  friend EmbeddingVector operator-(const EmbeddingVector& a, const EmbeddingVector& b) {
    check_same_dim(a, b);
    std::vector<double> out(a.dim());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values_[i] - b.values_[i];
    return EmbeddingVector(std::move(out));
  }

  friend EmbeddingVector operator*(double s, const EmbeddingVector& a) {
    std::vector<double> out(a.values_);
    for (double& v : out) v *= s;
    return EmbeddingVector(std::move(out));
  }

  /// In-place `this += scale * other`.
  void add_scaled(const EmbeddingVector& other, double scale) {
    check_same_dim(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += scale * other.values_[i];
    for (double v : values_) {
      detail::require(std::isfinite(v), ErrorCode::degenerate,
                      "embedding update produced a non-finite value");
    }
  }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

  static void check_same_dim(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
      detail::fail(ErrorCode::dimension_mismatch,
                   "embedding dims differ: " + std::to_string(a.dim()) + " vs " +
                       std::to_string(b.dim()));
    }
  }

 private:
  std::vector<double> values_;
};

inline double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
  EmbeddingVector::check_same_dim(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) sum += a[i] * b[i];
  return sum;
}

inline double euclidean_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  EmbeddingVector::check_same_dim(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

/// <a,b> / (|a||b|). Zero-norm inputs are rejected: they indicate a failed
/// upstream extraction rather than a meaningful direction.
inline double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  EmbeddingVector::check_same_dim(a, b);
  const double na = a.norm();
  const double nb = b.norm();
  detail::require(na > 0.0 && nb > 0.0, ErrorCode::degenerate,
                  "cosine similarity of a zero-norm embedding");
  const double c = dot(a, b) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

/// Ordered, 1-based list of class names.
class ClassCatalog {
 public:
  ClassCatalog() = default;
  explicit ClassCatalog(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      const auto [it, inserted] = by_name_.emplace(names_[i], static_cast<ClassIndex>(i + 1));
      detail::require(inserted, ErrorCode::invalid_argument,
                      "duplicate class name in catalog: " + names_[i]);
    }
  }

  std::size_t size() const noexcept { return names_.size(); }
  bool contains(ClassIndex index) const noexcept {
    return index >= 1 && static_cast<std::size_t>(index) <= names_.size();
  }

  const std::string& name(ClassIndex index) const {
    detail::require(contains(index), ErrorCode::invalid_argument,
                    "class index out of range: " + std::to_string(index));
    return names_[static_cast<std::size_t>(index - 1)];
  }

  ClassIndex index_of(const std::string& name) const {
    const auto it = by_name_.find(name);
    detail::require(it != by_name_.end(), ErrorCode::invalid_argument,
                    "unknown class name: " + name);
    return it->second;
  }

  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  std::vector<std::string> names_;
  std::map<std::string, ClassIndex> by_name_;
};

struct ClassifierConfig {
  /// Inverse temperature applied to cosine similarities before the softmax.
  double logit_scale = 100.0;

  void validate() const {
    detail::require(std::isfinite(logit_scale) && logit_scale > 0.0,
                    ErrorCode::invalid_argument, "logit_scale must be positive");
  }
};

struct LabeledEmbedding {
  ClassIndex class_index;
  EmbeddingVector embedding;
};

struct ClassProbability {
  ClassIndex class_index;
  double probability;
};

struct Classification {
  ClassIndex predicted;
  /// Probability of `predicted`; this is what reports call confidence.
  double confidence;
  /// One entry per candidate, in candidate order.
  std::vector<ClassProbability> distribution;
};

struct PredictionRecord {
  std::string frame_id;
  ClassIndex ground_truth;
  ClassIndex predicted;
  double confidence;
  std::string perturbation_tag;
};

namespace detail {

inline void check_candidates(std::span<const LabeledEmbedding> texts) {
  require(!texts.empty(), ErrorCode::invalid_argument, "no candidate classes");
  std::vector<ClassIndex> ids;
  ids.reserve(texts.size());
  for (const auto& t : texts) ids.push_back(t.class_index);
  std::sort(ids.begin(), ids.end());
  require(std::adjacent_find(ids.begin(), ids.end()) == ids.end(),
          ErrorCode::invalid_argument, "candidate class indices must be unique");
}

/// softmax(logit_scale * similarity) with argmax; ties go to the lowest index.
inline Classification softmax_classify(std::span<const LabeledEmbedding> texts,
                                       std::span<const double> similarities,
                                       const ClassifierConfig& cfg) {
  std::vector<double> logits(similarities.size());
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    logits[i] = cfg.logit_scale * similarities[i];
    max_logit = std::max(max_logit, logits[i]);
  }
  double total = 0.0;
  for (double& l : logits) {
    l = std::exp(l - max_logit);
    total += l;
  }

  Classification out{texts.front().class_index, 0.0, {}};
  out.distribution.reserve(texts.size());
  double best = -1.0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const double p = logits[i] / total;
    out.distribution.push_back({texts[i].class_index, p});
    if (p > best || (p == best && texts[i].class_index < out.predicted)) {
      best = p;
      out.predicted = texts[i].class_index;
    }
  }
  out.confidence = best;
  return out;
}

}  // namespace detail

/// Raw cosine similarity of `image` against every candidate, in candidate order.
inline std::vector<double> candidate_similarities(const EmbeddingVector& image,
                                                  std::span<const LabeledEmbedding> texts) {
  std::vector<double> sims;
  sims.reserve(texts.size());
  for (const auto& t : texts) sims.push_back(cosine_similarity(image, t.embedding));
  return sims;
}

/// Contrastive zero-shot classification of one image embedding against the
/// candidate prompt embeddings.
inline Classification zero_shot_classify(const EmbeddingVector& image,
                                         std::span<const LabeledEmbedding> texts,
                                         const ClassifierConfig& cfg = {}) {
  cfg.validate();
  detail::check_candidates(texts);
  const auto sims = candidate_similarities(image, texts);
  return detail::softmax_classify(texts, sims, cfg);
}

}  // namespace labeldisp
