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

// PNG codecs for frames (8-bit RGB) and segmentation masks (8-bit gray,
// value >= 128 reads as 1; written as 0/255). Decoding accepts any PNG that
// libpng can normalize to 8-bit; alpha is dropped.

#include <png.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "labeldisp/core/error.hpp"
#include "labeldisp/core/files.hpp"
#include "labeldisp/masking/image.hpp"

namespace labeldisp {

namespace detail {

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 (gray) or 3 (rgb)
  std::vector<std::uint8_t> data;
};

inline DecodedPng decode_png(std::string_view bytes, bool want_gray) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    fail(ErrorCode::format, std::string("PNG decode failed: ") + image.message);
  }
  image.format = want_gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  DecodedPng out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.channels = want_gray ? 1 : 3;
  out.data.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.data.data(), 0, nullptr)) {
    png_image_free(&image);
    fail(ErrorCode::format, std::string("PNG decode failed: ") + image.message);
  }
  return out;
}

inline std::string encode_png(int width, int height, bool gray, const std::uint8_t* data) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, data, 0, nullptr)) {
    fail(ErrorCode::format, std::string("PNG encode failed: ") + image.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, data, 0, nullptr)) {
    fail(ErrorCode::format, std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

}  // namespace detail

inline ImageFrame decode_frame_png(std::string_view bytes) {
  const auto png = detail::decode_png(bytes, false);
  std::vector<Rgb> pixels(static_cast<std::size_t>(png.width) * static_cast<std::size_t>(png.height));
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = {png.data[3 * i], png.data[3 * i + 1], png.data[3 * i + 2]};
  }
  return ImageFrame(png.width, png.height, std::move(pixels));
}

inline std::string encode_frame_png(const ImageFrame& frame) {
  std::vector<std::uint8_t> data;
  data.reserve(frame.area() * 3);
  for (const auto& p : frame.pixels()) {
    data.push_back(p.r);
    data.push_back(p.g);
    data.push_back(p.b);
  }
  return detail::encode_png(frame.width(), frame.height(), false, data.data());
}

inline SegmentationMask decode_mask_png(std::string_view bytes) {
  const auto png = detail::decode_png(bytes, true);
  std::vector<std::uint8_t> bits(png.data.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = png.data[i] >= 128 ? 1 : 0;
  return SegmentationMask(png.width, png.height, std::move(bits));
}

inline std::string encode_mask_png(const SegmentationMask& mask) {
  std::vector<std::uint8_t> data(mask.bits());
  for (auto& v : data) v = v ? 255 : 0;
  return detail::encode_png(mask.width(), mask.height(), true, data.data());
}

inline ImageFrame read_frame_png(const std::filesystem::path& path) {
  try {
    return decode_frame_png(read_file_bytes(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

inline void write_frame_png(const std::filesystem::path& path, const ImageFrame& frame) {
  write_file_bytes(path, encode_frame_png(frame));
}

inline SegmentationMask read_mask_png(const std::filesystem::path& path) {
  try {
    return decode_mask_png(read_file_bytes(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

inline void write_mask_png(const std::filesystem::path& path, const SegmentationMask& mask) {
  write_file_bytes(path, encode_mask_png(mask));
}

}  // namespace labeldisp
