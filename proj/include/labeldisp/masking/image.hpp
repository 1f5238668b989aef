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
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "labeldisp/core/error.hpp"

namespace labeldisp {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;

  bool is_black() const noexcept { return r == 0 && g == 0 && b == 0; }
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 8-bit RGB frame.
class ImageFrame {
 public:
  ImageFrame(int width, int height, Rgb fill = {})
      : ImageFrame(width, height, std::vector<Rgb>(checked_area(width, height), fill)) {}

  ImageFrame(int width, int height, std::vector<Rgb> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    detail::require(pixels_.size() == checked_area(width, height), ErrorCode::invalid_argument,
                    "pixel buffer does not match frame dimensions");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t area() const noexcept { return pixels_.size(); }

  const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }
  Rgb& at(int x, int y) { return pixels_[index(x, y)]; }
  const Rgb& operator[](std::size_t i) const { return pixels_[i]; }
  Rgb& operator[](std::size_t i) { return pixels_[i]; }

  const std::vector<Rgb>& pixels() const noexcept { return pixels_; }

  friend bool operator==(const ImageFrame&, const ImageFrame&) = default;

 private:
  static std::size_t checked_area(int width, int height) {
    detail::require(width > 0 && height > 0, ErrorCode::invalid_argument,
                    "frame dimensions must be positive");
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

/// Row-major binary mask; a set bit marks the pixel as part of the region.
class SegmentationMask {
 public:
  SegmentationMask(int width, int height, bool fill = false)
      : width_(width), height_(height) {
    detail::require(width > 0 && height > 0, ErrorCode::invalid_argument,
                    "mask dimensions must be positive");
    bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                 fill ? 1 : 0);
  }

  SegmentationMask(int width, int height, std::vector<std::uint8_t> bits)
      : width_(width), height_(height), bits_(std::move(bits)) {
    detail::require(width > 0 && height > 0, ErrorCode::invalid_argument,
                    "mask dimensions must be positive");
    detail::require(bits_.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                    ErrorCode::invalid_argument, "mask buffer does not match dimensions");
    detail::require(std::all_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b <= 1; }),
                    ErrorCode::invalid_argument, "mask bits must be 0 or 1");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t area() const noexcept { return bits_.size(); }

  bool test(std::size_t i) const { return bits_[i] != 0; }
  bool test(int x, int y) const {
    return test(static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x));
  }
  void set(int x, int y, bool value = true) {
    bits_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
          static_cast<std::size_t>(x)] = value ? 1 : 0;
  }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }

  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  bool matches(const ImageFrame& frame) const noexcept {
    return width_ == frame.width() && height_ == frame.height();
  }

  friend bool operator==(const SegmentationMask&, const SegmentationMask&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

inline SegmentationMask complement(const SegmentationMask& mask) {
  std::vector<std::uint8_t> bits(mask.bits());
  for (auto& b : bits) b = b ? 0 : 1;
  return SegmentationMask(mask.width(), mask.height(), std::move(bits));
}

}  // namespace labeldisp
