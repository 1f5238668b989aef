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
#include <span>
#include <string>
#include <vector>

#include "labeldisp/core/error.hpp"
#include "labeldisp/core/rng.hpp"
#include "labeldisp/masking/image.hpp"

namespace labeldisp {

enum class MaskStrategy { random_pixel, random_shape, feature, isolation };

inline const char* to_string(MaskStrategy s) {
  switch (s) {
    case MaskStrategy::random_pixel: return "random_pixel";
    case MaskStrategy::random_shape: return "random_shape";
    case MaskStrategy::feature: return "feature";
    case MaskStrategy::isolation: return "isolation";
  }
  return "unknown";
}

/// Declarative description of one perturbation.
struct MaskSettings {
  MaskStrategy strategy = MaskStrategy::random_pixel;
  double fraction = 0.0;                // random strategies
  std::vector<std::string> mask_refs;   // feature / isolation
  std::uint64_t seed = 0;               // random strategies

  void validate() const {
    const bool random =
        strategy == MaskStrategy::random_pixel || strategy == MaskStrategy::random_shape;
    if (random) {
      detail::require(fraction >= 0.0 && fraction <= 1.0, ErrorCode::invalid_argument,
                      "mask fraction must lie in [0, 1]");
    } else {
      detail::require(!mask_refs.empty(), ErrorCode::invalid_argument,
                      std::string(to_string(strategy)) + " masking needs at least one mask");
    }
  }
};

struct ShapeMaskOptions {
  /// Upper bound on the area of a single shape, as a fraction of the frame.
  double max_shape_fraction = 0.05;
};

struct ShapeMaskResult {
  ImageFrame frame;
  double achieved_fraction;
};

namespace detail {

inline void check_fraction(double p) {
  require(p >= 0.0 && p <= 1.0, ErrorCode::invalid_argument,
          "mask fraction must lie in [0, 1], got " + std::to_string(p));
}

// p * n rounded down, treating products within 1e-9 of an integer as that
// integer so decimal inputs like 0.3 * 100 count as 30.
inline std::size_t fraction_count_floor(double p, std::size_t n) {
  const double exact = p * static_cast<double>(n);
  const auto k = static_cast<std::size_t>(std::floor(exact + 1e-9));
  return std::min(k, n);
}

inline std::size_t fraction_count_ceil(double p, std::size_t n) {
  const double exact = p * static_cast<double>(n);
  const auto k = static_cast<std::size_t>(std::max(0.0, std::ceil(exact - 1e-9)));
  return std::min(k, n);
}

}  // namespace detail

inline std::size_t count_black(const ImageFrame& frame) {
  return static_cast<std::size_t>(std::count_if(frame.pixels().begin(), frame.pixels().end(),
                                                [](const Rgb& p) { return p.is_black(); }));
}

inline double black_fraction(const ImageFrame& frame) {
  return static_cast<double>(count_black(frame)) / static_cast<double>(frame.area());
}

/// Blackens exactly floor(p * W * H) distinct pixels chosen by a seeded
/// partial shuffle of the pixel positions.
inline ImageFrame mask_random_pixels(const ImageFrame& frame, double p, std::uint64_t seed) {
  detail::check_fraction(p);
  ImageFrame out = frame;
  const std::size_t k = detail::fraction_count_floor(p, frame.area());
  Rng rng(seed);
  for (std::size_t pos : rng.sample_without_replacement(frame.area(), k)) out[pos] = Rgb{};
  return out;
}

/// Paints random black rectangles and filled circles until the black-pixel
/// fraction reaches `p`. Each shape covers at most
/// max(1, floor(max_shape_fraction * W * H)) pixels, so the overshoot past `p`
/// is bounded by one shape. Shapes may extend past the frame border and are
/// clipped, which gives every pixel the same chance of being covered.
inline ShapeMaskResult mask_random_shapes(const ImageFrame& frame, double p, std::uint64_t seed,
                                          const ShapeMaskOptions& options = {}) {
  detail::check_fraction(p);
  detail::require(options.max_shape_fraction > 0.0 && options.max_shape_fraction <= 1.0,
                  ErrorCode::invalid_argument, "max_shape_fraction must lie in (0, 1]");

  ImageFrame out = frame;
  const int w = frame.width();
  const int h = frame.height();
  const std::size_t area = frame.area();
  const std::size_t target = detail::fraction_count_ceil(p, area);
  const auto max_area = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::floor(options.max_shape_fraction * static_cast<double>(area))));

  std::size_t black = count_black(out);
  auto paint = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= w || y >= h) return;
    Rgb& px = out.at(x, y);
    if (!px.is_black()) {
      px = Rgb{};
      ++black;
    }
  };

  // Largest radius whose lattice disc fits within max_area.
  auto half_width = [](std::int64_t r, std::int64_t dy) {
    return static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(r * r - dy * dy))));
  };
  auto disc_area = [&](std::int64_t r) {
    std::int64_t n = 0;
    for (std::int64_t dy = -r; dy <= r; ++dy) n += 2 * half_width(r, dy) + 1;
    return n;
  };
  std::int64_t r_max = 0;
  while (disc_area(r_max + 1) <= max_area) ++r_max;

  Rng rng(seed);
  while (black < target) {
    if (rng.below(2) == 0) {
      const auto rw = rng.between(1, std::min<std::int64_t>(w, max_area));
      const auto rh = rng.between(1, std::min<std::int64_t>(h, max_area / rw));
      const auto x0 = rng.between(-(rw - 1), w - 1);
      const auto y0 = rng.between(-(rh - 1), h - 1);
      for (auto y = y0; y < y0 + rh; ++y) {
        for (auto x = x0; x < x0 + rw; ++x) paint(static_cast<int>(x), static_cast<int>(y));
      }
    } else {
      const auto r = rng.between(0, r_max);
      const auto cx = rng.between(0, w - 1);
      const auto cy = rng.between(0, h - 1);
      for (auto dy = -r; dy <= r; ++dy) {
        const auto half = half_width(r, dy);
        for (auto dx = -half; dx <= half; ++dx) {
          paint(static_cast<int>(cx + dx), static_cast<int>(cy + dy));
        }
      }
    }
  }
  return {std::move(out), static_cast<double>(black) / static_cast<double>(area)};
}

/// Union of masks of identical dimensions.
inline SegmentationMask mask_union(std::span<const SegmentationMask> masks) {
  detail::require(!masks.empty(), ErrorCode::invalid_argument, "mask list is empty");
  std::vector<std::uint8_t> bits(masks.front().bits());
  for (const auto& m : masks.subspan(1)) {
    detail::require(m.width() == masks.front().width() && m.height() == masks.front().height(),
                    ErrorCode::dimension_mismatch, "masks differ in dimensions");
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] |= m.bits()[i];
  }
  return SegmentationMask(masks.front().width(), masks.front().height(), std::move(bits));
}

/// Blackens every pixel covered by any of `masks`.
inline ImageFrame apply_feature_mask(const ImageFrame& frame,
                                     std::span<const SegmentationMask> masks) {
  detail::require(!masks.empty(), ErrorCode::invalid_argument, "mask list is empty");
  for (const auto& m : masks) {
    detail::require(m.matches(frame), ErrorCode::dimension_mismatch,
                    "mask " + std::to_string(m.width()) + "x" + std::to_string(m.height()) +
                        " does not match frame " + std::to_string(frame.width()) + "x" +
                        std::to_string(frame.height()));
  }
  ImageFrame out = frame;
  for (std::size_t i = 0; i < out.area(); ++i) {
    for (const auto& m : masks) {
      if (m.test(i)) {
        out[i] = Rgb{};
        break;
      }
    }
  }
  return out;
}

/// Keeps only the pixels inside `keep`; everything else goes black.
inline ImageFrame apply_isolation_mask(const ImageFrame& frame, const SegmentationMask& keep) {
  detail::require(keep.matches(frame), ErrorCode::dimension_mismatch,
                  "keep mask does not match frame dimensions");
  ImageFrame out = frame;
  for (std::size_t i = 0; i < out.area(); ++i) {
    if (!keep.test(i)) out[i] = Rgb{};
  }
  return out;
}

}  // namespace labeldisp
