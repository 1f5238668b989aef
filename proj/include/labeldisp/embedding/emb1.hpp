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

// EMB1 container: the bytes "EMB1", then little-endian u32 dim, u32 count,
// then `count` rows of `dim` little-endian IEEE-754 binary32 values.
//
// Row identities live in a sidecar text file next to the payload
// (`<file>.ids`), one id per line in row order. Lines starting with '#' are
// header records of the form `# key=value` and are not rows.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "labeldisp/core/files.hpp"
#include "labeldisp/core/error.hpp"
#include "labeldisp/embedding/embedding.hpp"

namespace labeldisp {

inline constexpr std::string_view kEmb1Magic = "EMB1";
inline constexpr std::size_t kEmb1HeaderSize = 12;

struct Emb1Matrix {
  std::uint32_t dim = 0;
  std::vector<EmbeddingVector> rows;
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

inline std::uint32_t get_u32(std::string_view in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return v;
}

}  // namespace detail

/// Serializes rows to EMB1 bytes. Values are narrowed to binary32; values
/// outside the float range are rejected.
inline std::string encode_emb1(std::uint32_t dim, const std::vector<EmbeddingVector>& rows) {
  detail::require(dim >= 1 || rows.empty(), ErrorCode::invalid_argument,
                  "EMB1 dim must be >= 1 for a non-empty file");
  detail::require(rows.size() <= std::numeric_limits<std::uint32_t>::max(),
                  ErrorCode::invalid_argument, "too many EMB1 rows");
  std::string out;
  out.reserve(kEmb1HeaderSize + rows.size() * dim * 4);
  out.append(kEmb1Magic);
  detail::put_u32(out, dim);
  detail::put_u32(out, static_cast<std::uint32_t>(rows.size()));
  for (const auto& row : rows) {
    detail::require(row.dim() == dim, ErrorCode::dimension_mismatch,
                    "EMB1 row dim " + std::to_string(row.dim()) + " != header dim " +
                        std::to_string(dim));
    for (double v : row.values()) {
      const auto f = static_cast<float>(v);
      detail::require(std::isfinite(f), ErrorCode::invalid_argument,
                      "value outside binary32 range");
      detail::put_u32(out, std::bit_cast<std::uint32_t>(f));
    }
  }
  return out;
}

inline Emb1Matrix decode_emb1(std::string_view bytes) {
  detail::require(bytes.size() >= kEmb1HeaderSize, ErrorCode::format,
                  "EMB1 payload truncated in header");
  detail::require(bytes.substr(0, 4) == kEmb1Magic, ErrorCode::format, "bad EMB1 magic");
  Emb1Matrix out;
  out.dim = detail::get_u32(bytes, 4);
  const std::uint32_t count = detail::get_u32(bytes, 8);
  detail::require(out.dim >= 1 || count == 0, ErrorCode::format,
                  "EMB1 dim 0 with non-zero row count");
  const auto expected =
      kEmb1HeaderSize + static_cast<std::uint64_t>(out.dim) * count * 4;
  detail::require(bytes.size() >= expected, ErrorCode::format, "EMB1 payload truncated");
  detail::require(bytes.size() == expected, ErrorCode::format,
                  "EMB1 payload has trailing bytes");
  out.rows.reserve(count);
  std::size_t offset = kEmb1HeaderSize;
  for (std::uint32_t r = 0; r < count; ++r) {
    std::vector<double> values(out.dim);
    for (auto& v : values) {
      v = static_cast<double>(std::bit_cast<float>(detail::get_u32(bytes, offset)));
      offset += 4;
    }
    out.rows.emplace_back(std::move(values));
  }
  return out;
}

/// Rows plus their sidecar ids and header records.
class Emb1Table {
 public:
  std::uint32_t dim = 0;
  std::vector<std::string> ids;
  std::vector<EmbeddingVector> rows;
  std::map<std::string, std::string> header;

  std::size_t size() const noexcept { return rows.size(); }

  /// Row lookup by sidecar id.
  const EmbeddingVector* find(const std::string& id) const {
    if (index_.size() != ids.size()) rebuild_index();
    const auto it = index_.find(id);
    return it == index_.end() ? nullptr : &rows[it->second];
  }

  const EmbeddingVector& at(const std::string& id) const {
    const auto* row = find(id);
    detail::require(row != nullptr, ErrorCode::invalid_argument,
                    "no embedding row with id '" + id + "'");
    return *row;
  }

  void add(std::string id, EmbeddingVector row) {
    if (rows.empty() && dim == 0) dim = static_cast<std::uint32_t>(row.dim());
    detail::require(row.dim() == dim, ErrorCode::dimension_mismatch,
                    "row dim does not match table dim");
    ids.push_back(std::move(id));
    rows.push_back(std::move(row));
  }

 private:
  void rebuild_index() const {
    index_.clear();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto [it, inserted] = index_.emplace(ids[i], i);
      detail::require(inserted, ErrorCode::format, "duplicate sidecar id '" + ids[i] + "'");
    }
  }

  mutable std::unordered_map<std::string, std::size_t> index_;
};

inline std::filesystem::path sidecar_path(const std::filesystem::path& emb_path) {
  auto p = emb_path;
  p += ".ids";
  return p;
}

inline std::string encode_sidecar(const std::vector<std::string>& ids,
                                  const std::map<std::string, std::string>& header = {}) {
  std::string out;
  for (const auto& [key, value] : header) {
    detail::require(key.find_first_of("=\n") == std::string::npos &&
                        value.find('\n') == std::string::npos,
                    ErrorCode::invalid_argument, "malformed sidecar header record");
    out += "# " + key + "=" + value + "\n";
  }
  for (const auto& id : ids) {
    detail::require(!id.empty() && id.front() != '#' && id.find('\n') == std::string::npos,
                    ErrorCode::invalid_argument, "sidecar id is not representable: " + id);
    out += id;
    out += '\n';
  }
  return out;
}

inline std::pair<std::vector<std::string>, std::map<std::string, std::string>> decode_sidecar(
    std::string_view text) {
  std::vector<std::string> ids;
  std::map<std::string, std::string> header;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view rec(line);
      rec.remove_prefix(1);
      while (!rec.empty() && rec.front() == ' ') rec.remove_prefix(1);
      const auto eq = rec.find('=');
      detail::require(eq != std::string_view::npos, ErrorCode::format,
                      "sidecar header record without '=': " + line);
      header.emplace(std::string(rec.substr(0, eq)), std::string(rec.substr(eq + 1)));
      continue;
    }
    ids.push_back(line);
  }
  return {std::move(ids), std::move(header)};
}

inline void write_emb1(const std::filesystem::path& path, const Emb1Table& table) {
  detail::require(table.ids.size() == table.rows.size(), ErrorCode::invalid_argument,
                  "EMB1 ids and rows differ in length");
  write_file_bytes(path, encode_emb1(table.dim, table.rows));
  write_file_bytes(sidecar_path(path), encode_sidecar(table.ids, table.header));
}

inline Emb1Table read_emb1(const std::filesystem::path& path) {
  auto matrix = decode_emb1(read_file_bytes(path));
  auto [ids, header] = decode_sidecar(read_file_bytes(sidecar_path(path)));
  detail::require(ids.size() == matrix.rows.size(), ErrorCode::format,
                  "sidecar of " + path.string() + " lists " + std::to_string(ids.size()) +
                      " ids for " + std::to_string(matrix.rows.size()) + " rows");
  Emb1Table table;
  table.dim = matrix.dim;
  table.rows = std::move(matrix.rows);
  table.ids = std::move(ids);
  table.header = std::move(header);
  return table;
}

}  // namespace labeldisp
