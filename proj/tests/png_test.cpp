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
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "labeldisp/masking/png_io.hpp"
#include "support.hpp"

namespace labeldisp {
namespace {

using testing::random_frame;
using testing::TempDir;

TEST(Png, FrameRoundTrip) {
  Rng rng(12);
  const auto frame = random_frame(rng, 13, 7, true);
  EXPECT_EQ(decode_frame_png(encode_frame_png(frame)), frame);
}

TEST(Png, MaskRoundTripAndThreshold) {
  SegmentationMask m(5, 3);
  m.set(0, 0);
  m.set(4, 2);
  EXPECT_EQ(decode_mask_png(encode_mask_png(m)), m);

  const std::vector<std::uint8_t> gray{0, 127, 128, 255};
  const auto bytes = detail::encode_png(4, 1, true, gray.data());
  const auto decoded = decode_mask_png(bytes);
  EXPECT_EQ(decoded.bits(), (std::vector<std::uint8_t>{0, 0, 1, 1}));
}

TEST(Png, MaskFromRgbFile) {
  // A black/white RGB image also reads as a mask.
  ImageFrame f(2, 1);
  f.at(1, 0) = Rgb{255, 255, 255};
  const auto m = decode_mask_png(encode_frame_png(f));
  EXPECT_EQ(m.bits(), (std::vector<std::uint8_t>{0, 1}));
}

TEST(Png, FilesAndErrors) {
  TempDir dir("png");
  Rng rng(1);
  const auto frame = random_frame(rng, 4, 4);
  write_frame_png(dir / "sub/a.png", frame);
  EXPECT_EQ(read_frame_png(dir / "sub/a.png"), frame);
  EXPECT_THROW(read_frame_png(dir / "missing.png"), Error);
  write_file_bytes(dir / "junk.png", "not a png");
  try {
    read_frame_png(dir / "junk.png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::format);
  }
}

TEST(Png, MaskKeepDuality) {
  Rng rng(9);
  SegmentationMask keep(6, 6);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 6; ++x) keep.set(x, y, rng.below(3) == 0);
  }
  const auto round = decode_mask_png(encode_mask_png(complement(keep)));
  for (std::size_t i = 0; i < keep.area(); ++i) EXPECT_NE(round.test(i), keep.test(i));
}

}  // namespace
}  // namespace labeldisp
