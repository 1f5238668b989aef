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

#include <cstdio>
#include <filesystem>
#include <map>
#include <string>

#include "labeldisp/core/error.hpp"
#include "labeldisp/embedding/emb1.hpp"
#include "labeldisp/noise/noise.hpp"

namespace labeldisp {

namespace detail {

inline std::string format_roundtrip(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Training parameters stored alongside a persisted dictionary.
inline std::map<std::string, std::string> provenance_header(const TripletConfig& cfg) {
  return {{"margin", detail::format_roundtrip(cfg.margin)},
          {"learning_rate", detail::format_roundtrip(cfg.learning_rate)},
          {"epochs", std::to_string(cfg.epochs)},
          {"seed", std::to_string(cfg.seed)}};
}

/// Serializes the dictionary as an EMB1 table: one row per class in ascending
/// order, sidecar ids are the class indices.
inline Emb1Table to_emb1(const NoiseDictionary& dict,
                         std::map<std::string, std::string> header = {}) {
  Emb1Table table;
  table.dim = static_cast<std::uint32_t>(dict.dim());
  for (const auto& [c, v] : dict.entries()) table.add(std::to_string(c), v);
  table.header = std::move(header);
  return table;
}

inline NoiseDictionary from_emb1(const Emb1Table& table) {
  detail::require(table.dim >= 1, ErrorCode::format, "noise dictionary has dim 0");
  NoiseDictionary dict(table.dim);
  for (std::size_t i = 0; i < table.size(); ++i) {
    ClassIndex c = 0;
    try {
      std::size_t used = 0;
      c = std::stoi(table.ids[i], &used);
      detail::require(used == table.ids[i].size(), ErrorCode::format, "");
    } catch (const std::exception&) {
      detail::fail(ErrorCode::format, "noise dictionary id is not a class index: " + table.ids[i]);
    }
    detail::require(!dict.contains(c), ErrorCode::format,
                    "noise dictionary lists class " + table.ids[i] + " twice");
    dict.set(c, table.rows[i]);
  }
  return dict;
}

inline void write_noise_dictionary(const std::filesystem::path& path, const NoiseDictionary& dict,
                                   const TripletConfig& cfg) {
  write_emb1(path, to_emb1(dict, provenance_header(cfg)));
}

struct LoadedNoiseDictionary {
  NoiseDictionary dictionary;
  std::map<std::string, std::string> provenance;
};

inline LoadedNoiseDictionary read_noise_dictionary(const std::filesystem::path& path) {
  auto table = read_emb1(path);
  return {from_emb1(table), std::move(table.header)};
}

}  // namespace labeldisp
