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
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "labeldisp/core/error.hpp"
#include "labeldisp/core/rng.hpp"
#include "labeldisp/pipeline/manifest.hpp"

namespace labeldisp {

struct FrameSplit {
  std::vector<std::string> train;  // frame ids, sorted
  std::vector<std::string> eval;   // frame ids, sorted
};

/// Seeded per-class train/eval split. Within each class frames are ranked by a
/// hash of (seed, frame id), so the result depends only on the seed and the set
/// of ids. Each class keeps round(train_fraction * n) frames for training,
/// clamped so both sides are non-empty when the class has two or more frames.
inline FrameSplit split_frames(const std::vector<FrameEntry>& frames, std::uint64_t seed,
                               double train_fraction) {
  detail::require(train_fraction > 0.0 && train_fraction < 1.0, ErrorCode::invalid_argument,
                  "train_fraction must lie in (0, 1)");
  std::map<ClassIndex, std::vector<std::pair<std::uint64_t, std::string>>> by_class;
  for (const auto& f : frames) {
    by_class[f.class_index].emplace_back(derive_seed(seed, "split|" + f.id), f.id);
  }
  FrameSplit out;
  for (auto& [c, ranked] : by_class) {
    std::sort(ranked.begin(), ranked.end());
    const auto n = static_cast<std::int64_t>(ranked.size());
    auto n_train = static_cast<std::int64_t>(std::llround(train_fraction * static_cast<double>(n)));
    n_train = n < 2 ? n : std::clamp<std::int64_t>(n_train, 1, n - 1);
    for (std::int64_t i = 0; i < n; ++i) {
      (i < n_train ? out.train : out.eval).push_back(ranked[static_cast<std::size_t>(i)].second);
    }
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.eval.begin(), out.eval.end());
  return out;
}

}  // namespace labeldisp
