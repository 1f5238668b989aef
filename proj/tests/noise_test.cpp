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
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "labeldisp/noise/noise.hpp"
#include "support.hpp"

namespace labeldisp {
namespace {

using testing::random_vector;

// Store with two classes (1 and 2) of `per_class` random features each.
FeatureStore random_store(Rng& rng, std::size_t dim, std::size_t per_class = 3) {
  FeatureStore s;
  for (ClassIndex c : {1, 2}) {
    for (std::size_t i = 0; i < per_class; ++i) s.add(c, random_vector(rng, dim));
  }
  return s;
}

NoiseDictionary random_noise(Rng& rng, std::size_t dim, double scale = 1.0) {
  NoiseDictionary d(dim);
  d.set(1, random_vector(rng, dim, scale));
  d.set(2, random_vector(rng, dim, scale));
  return d;
}

const Triplet kTriplet{1, 0, 1, 2, 2};

// Loss evaluated directly from the definition, independent of the library's
// distance helpers.
double loss_oracle(const FeatureStore& s, const NoiseDictionary& n, const Triplet& t,
                   double margin) {
  const auto& a = s.features(t.anchor_class)[t.anchor];
  const auto& p = s.features(t.anchor_class)[t.positive];
  const auto& q = s.features(t.negative_class)[t.negative];
  const auto& nc = n.at(t.anchor_class);
  const auto& nn = n.at(t.negative_class);
  long double ap = 0, an = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const long double x = a[i] + nc[i];
    const long double y = p[i] + nc[i];
    const long double z = q[i] + nn[i];
    ap += (x - y) * (x - y);
    an += (x - z) * (x - z);
  }
  return static_cast<double>(std::max<long double>(0, std::sqrt(ap) - std::sqrt(an) + margin));
}

TEST(TripletLoss, Hinge) {
  EXPECT_DOUBLE_EQ(triplet_loss(1.0, 3.0, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(triplet_loss(3.0, 1.0, 0.5), 2.5);
  EXPECT_THROW(triplet_loss(-1.0, 1.0, 0.1), Error);
}

TEST(AugmentedLoss, MatchesDefinition) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto s = random_store(rng, 5);
    const auto n = random_noise(rng, 5);
    EXPECT_NEAR(augmented_triplet_loss(kTriplet, s, n, 0.7), loss_oracle(s, n, kTriplet, 0.7), 1e-12);
  }
}

TEST(AugmentedLoss, SharedNoiseCancelsInIntraDistance) {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const std::size_t dim = 1 + rng.below(64);
    const auto s = random_store(rng, dim);
    const auto n = random_noise(rng, dim, 10.0);
    const double raw = euclidean_distance(s.features(1)[0], s.features(1)[1]);
    EXPECT_NEAR(augmented_intra_distance(kTriplet, s, n), raw, 1e-12);
  }
}

TEST(AugmentedLoss, ZeroNoiseIsPlainTriplet) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto s = random_store(rng, 8);
    const std::vector<ClassIndex> classes{1, 2};
    const auto zero = NoiseDictionary::zeros(8, classes);
    const double plain = triplet_loss(euclidean_distance(s.features(1)[0], s.features(1)[1]),
                                      euclidean_distance(s.features(1)[0], s.features(2)[2]), 0.3);
    EXPECT_EQ(augmented_triplet_loss(kTriplet, s, zero, 0.3), plain);
  }
}

TEST(AugmentedLoss, RejectsBadTriplets) {
  Rng rng(4);
  const auto s = random_store(rng, 3);
  const auto n = random_noise(rng, 3);
  EXPECT_THROW(augmented_triplet_loss({1, 0, 0, 2, 0}, s, n, 0.1), Error);
  EXPECT_THROW(augmented_triplet_loss({1, 0, 1, 1, 2}, s, n, 0.1), Error);
  EXPECT_THROW(augmented_triplet_loss({1, 0, 9, 2, 0}, s, n, 0.1), Error);
  EXPECT_THROW(augmented_triplet_loss(kTriplet, s, NoiseDictionary(4), 0.1), Error);
}

TEST(Gradient, MatchesCentralDifferences) {
  Rng rng(5);
  int checked = 0;
  while (checked < 60) {
    const std::size_t dim = std::vector<std::size_t>{2, 8, 64}[checked % 3];
    const auto s = random_store(rng, dim);
    auto n = random_noise(rng, dim, 0.5);
    const double margin = 1.0 + rng.unit() * 2.0;
    if (loss_oracle(s, n, kTriplet, margin) <= 1e-3) continue;
    ++checked;
    const auto g = noise_gradient(kTriplet, s, n, margin);
    for (ClassIndex c : {1, 2}) {
      const auto& analytic = c == 1 ? g.anchor_class : g.negative_class;
      for (std::size_t i = 0; i < dim; ++i) {
        const double h = 1e-5;
        auto bump = [&](double delta) {
          std::vector<double> v(n.at(c).values().begin(), n.at(c).values().end());
          v[i] += delta;
          NoiseDictionary m = n;
          m.set(c, EmbeddingVector(std::move(v)));
          return loss_oracle(s, m, kTriplet, margin);
        };
        const double fd = (bump(h) - bump(-h)) / (2 * h);
        const double denom = std::max({std::abs(analytic[i]), std::abs(fd), 1e-4});
        EXPECT_LE(std::abs(analytic[i] - fd) / denom, 1e-4) << "dim " << dim << " coord " << i;
      }
    }
  }
}

TEST(Gradient, OppositeUnitVectors) {
  Rng rng(6);
  const auto s = random_store(rng, 6);
  const auto n = random_noise(rng, 6);
  const auto g = noise_gradient(kTriplet, s, n, 100.0);
  EXPECT_NEAR(g.anchor_class.norm(), 1.0, 1e-12);
  EXPECT_EQ(g.anchor_class + g.negative_class, EmbeddingVector::zeros(6));
}

TEST(Gradient, InactiveHingeGivesZero) {
  FeatureStore s;
  s.add(1, {0.0, 0.0});
  s.add(1, {0.1, 0.0});
  s.add(2, {5.0, 0.0});
  const auto n = NoiseDictionary::zeros(2, std::vector<ClassIndex>{1, 2});
  const auto g = noise_gradient({1, 0, 1, 2, 0}, s, n, 0.5);
  EXPECT_TRUE(g.anchor_class.is_zero());
  EXPECT_TRUE(g.negative_class.is_zero());
}

TEST(Gradient, CoincidentAnchorAndNegativeIsDegenerate) {
  FeatureStore s;
  s.add(1, {0.0, 0.0});
  s.add(1, {1.0, 0.0});
  s.add(2, {0.0, 0.0});
  const auto n = NoiseDictionary::zeros(2, std::vector<ClassIndex>{1, 2});
  try {
    noise_gradient({1, 0, 1, 2, 0}, s, n, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate);
  }
}

// Brute-force hypothesis scoring: argmax over c of cos(image + N_c, text_c).
ClassIndex score_oracle(const EmbeddingVector& image, const std::vector<LabeledEmbedding>& texts,
                        const NoiseDictionary& noise) {
  ClassIndex best = 0;
  long double best_score = -2;
  for (const auto& t : texts) {
    const auto shifted = image + noise.at(t.class_index);
    long double d = 0, a = 0, b = 0;
    for (std::size_t i = 0; i < image.dim(); ++i) {
      d += static_cast<long double>(shifted[i]) * t.embedding[i];
      a += static_cast<long double>(shifted[i]) * shifted[i];
      b += static_cast<long double>(t.embedding[i]) * t.embedding[i];
    }
    const long double score = d / std::sqrt(a * b);
    if (score > best_score) {
      best_score = score;
      best = t.class_index;
    }
  }
  return best;
}

TEST(NoiseAware, ClassNoiseFlipsPrediction) {
  const std::vector<LabeledEmbedding> texts{{1, {1.0, 0.0}}, {2, {0.9, 0.4}}};
  const double norm = std::sqrt(1.25);
  const EmbeddingVector image{1.0 / norm, 0.5 / norm};

  const auto zero = NoiseDictionary::zeros(2, std::vector<ClassIndex>{1, 2});
  EXPECT_EQ(score_oracle(image, texts, zero), 2);
  EXPECT_EQ(zero_shot_classify(image, texts).predicted, 2);

  NoiseDictionary noise = zero;
  noise.set(1, {0.0, -0.5 / norm});
  EXPECT_EQ(score_oracle(image, texts, noise), 1);
  EXPECT_EQ(noise_aware_classify(image, texts, noise).predicted, 1);
}

TEST(NoiseAware, AgreesWithOracleOnRandomFixtures) {
  Rng rng(7);
  for (int i = 0; i < 300; ++i) {
    const std::size_t dim = 2 + rng.below(16);
    std::vector<LabeledEmbedding> texts;
    NoiseDictionary noise(dim);
    for (ClassIndex c = 1; c <= 5; ++c) {
      texts.push_back({c, random_vector(rng, dim)});
      noise.set(c, random_vector(rng, dim, 0.3));
    }
    const auto image = random_vector(rng, dim);
    EXPECT_EQ(noise_aware_classify(image, texts, noise).predicted, score_oracle(image, texts, noise));
  }
}

TEST(NoiseAware, ZeroDictionaryReducesExactly) {
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const std::size_t dim = 2 + rng.below(32);
    std::vector<LabeledEmbedding> texts;
    std::vector<ClassIndex> classes;
    for (ClassIndex c = 1; c <= 4; ++c) {
      texts.push_back({c, random_vector(rng, dim)});
      classes.push_back(c);
    }
    const auto image = random_vector(rng, dim);
    const auto a = zero_shot_classify(image, texts);
    const auto b = noise_aware_classify(image, texts, NoiseDictionary::zeros(dim, classes));
    EXPECT_EQ(a.predicted, b.predicted);
    EXPECT_EQ(a.confidence, b.confidence);
  }
}

TEST(NoiseAware, MissingNoiseVector) {
  const std::vector<LabeledEmbedding> texts{{1, {1.0, 0.0}}, {2, {0.0, 1.0}}};
  NoiseDictionary noise(2);
  noise.set(1, {0.0, 0.0});
  EXPECT_THROW(noise_aware_classify({1.0, 1.0}, texts, noise), Error);
}

TEST(NoiseDictionary, DimChecks) {
  NoiseDictionary d(3);
  EXPECT_THROW(d.set(1, {1.0, 2.0}), Error);
  EXPECT_THROW(NoiseDictionary(0), Error);
  EXPECT_THROW(d.at(4), Error);
}

}  // namespace
}  // namespace labeldisp
