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
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "labeldisp/embedding/emb1.hpp"
#include "support.hpp"

namespace labeldisp {
namespace {

using testing::TempDir;

std::string hex(const std::string& bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (unsigned char c : bytes) {
    out += kDigits[c >> 4];
    out += kDigits[c & 15];
  }
  return out;
}

TEST(Emb1, FrozenLayout) {
  // 1.0f = 0x3f800000, -2.0f = 0xc0000000, little-endian.
  const auto bytes = encode_emb1(2, {EmbeddingVector{1.0, -2.0}});
  EXPECT_EQ(hex(bytes), "454d4231" "02000000" "01000000" "0000803f" "000000c0");
}

TEST(Emb1, RoundTripIsExactForBinary32Values) {
  Rng rng(3);
  std::vector<EmbeddingVector> rows;
  for (int r = 0; r < 17; ++r) {
    std::vector<double> v(9);
    for (double& x : v) x = static_cast<double>(static_cast<float>(rng.uniform(-4.0, 4.0)));
    rows.emplace_back(std::move(v));
  }
  const auto decoded = decode_emb1(encode_emb1(9, rows));
  EXPECT_EQ(decoded.dim, 9u);
  EXPECT_EQ(decoded.rows, rows);
}

TEST(Emb1, EmptyFile) {
  const auto decoded = decode_emb1(encode_emb1(0, {}));
  EXPECT_EQ(decoded.dim, 0u);
  EXPECT_TRUE(decoded.rows.empty());
}

TEST(Emb1, RejectsMalformedPayloads) {
  const auto good = encode_emb1(2, {EmbeddingVector{1.0, 2.0}});
  auto bad_magic = good;
  bad_magic[3] = '2';
  EXPECT_THROW(decode_emb1(bad_magic), Error);
  EXPECT_THROW(decode_emb1(good.substr(0, 8)), Error);
  EXPECT_THROW(decode_emb1(good.substr(0, good.size() - 1)), Error);
  EXPECT_THROW(decode_emb1(good + "x"), Error);
  try {
    decode_emb1(good.substr(0, good.size() - 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::format);
  }
  EXPECT_THROW(encode_emb1(3, {EmbeddingVector{1.0, 2.0}}), Error);
  EXPECT_THROW(encode_emb1(1, {EmbeddingVector{1e300}}), Error);
}

TEST(Emb1, SidecarHeaderAndIds) {
  const auto text = encode_sidecar({"a", "b@pixel/p10"}, {{"margin", "0.2"}, {"seed", "7"}});
  EXPECT_EQ(text, "# margin=0.2\n# seed=7\na\nb@pixel/p10\n");
  const auto [ids, header] = decode_sidecar(text);
  EXPECT_EQ(ids, (std::vector<std::string>{"a", "b@pixel/p10"}));
  EXPECT_EQ(header.at("seed"), "7");
  EXPECT_THROW(encode_sidecar({"#hidden"}), Error);
  EXPECT_THROW(decode_sidecar("# novalue\n"), Error);
}

TEST(Emb1, TableFilesRoundTrip) {
  TempDir dir("emb1");
  Emb1Table t;
  t.add("x", EmbeddingVector{0.5, 0.25});
  t.add("y", EmbeddingVector{-1.0, 4.0});
  t.header["note"] = "hello";
  write_emb1(dir / "t.emb", t);
  ASSERT_TRUE(std::filesystem::exists(dir / "t.emb.ids"));
  const auto back = read_emb1(dir / "t.emb");
  EXPECT_EQ(back.ids, t.ids);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.at("y"), (EmbeddingVector{-1.0, 4.0}));
  EXPECT_EQ(back.find("z"), nullptr);
}

TEST(Emb1, SidecarCountMustMatch) {
  TempDir dir("emb1");
  write_file_bytes(dir / "t.emb", encode_emb1(1, {EmbeddingVector{1.0}, EmbeddingVector{2.0}}));
  write_file_bytes(dir / "t.emb.ids", "only\n");
  EXPECT_THROW(read_emb1(dir / "t.emb"), Error);
}

TEST(Emb1, DuplicateIdsAreRejectedOnLookup) {
  Emb1Table t;
  t.add("x", EmbeddingVector{1.0});
  t.add("x", EmbeddingVector{2.0});
  EXPECT_THROW(t.find("x"), Error);
}

}  // namespace
}  // namespace labeldisp
