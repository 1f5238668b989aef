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

// Dataset manifest (JSON):
//
//   {
//     "catalog": "ucf101" | [{"index": 1, "name": "..."}, ...],
//     "prompt_template": "a photo of a person doing {class}",
//     "text_embeddings": "texts.emb",          // sidecar ids = class indices
//     "frames": [
//       {"id": "v1_f0", "class": 1,
//        "image": "frames/v1_f0.png",           // optional
//        "embedding": "frames.emb#v1_f0",       // optional; "#key" defaults to id
//        "masks": {"grass": "m/grass.png", "keep": "m/keep.png"},   // optional
//        "perturbed": {"pixel/p10": "masked.emb#v1_f0@pixel/p10"}}  // optional
//     ]
//   }
//
// Relative paths resolve against the manifest's directory.

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "labeldisp/core/error.hpp"
#include "labeldisp/core/files.hpp"
#include "labeldisp/embedding/emb1.hpp"
#include "labeldisp/embedding/embedding.hpp"
#include "labeldisp/embedding/ucf101.hpp"

namespace labeldisp {

inline constexpr std::string_view kDefaultPromptTemplate = "a photo of a person doing {class}";
inline constexpr std::string_view kKeepMaskName = "keep";

struct EmbeddingRef {
  std::filesystem::path file;
  std::string key;

  friend bool operator==(const EmbeddingRef&, const EmbeddingRef&) = default;
};

struct FrameEntry {
  std::string id;
  ClassIndex class_index = 0;
  std::optional<std::filesystem::path> image;
  std::optional<EmbeddingRef> embedding;
  std::map<std::string, std::filesystem::path> masks;
  std::map<std::string, EmbeddingRef> perturbed;

  /// Mask names other than the isolation `keep` mask.
  std::vector<std::string> feature_mask_names() const {
    std::vector<std::string> out;
    for (const auto& [name, path] : masks) {
      if (name != kKeepMaskName) out.push_back(name);
    }
    return out;
  }
};

class DatasetManifest {
 public:
  ClassCatalog catalog;
  std::string prompt_template{kDefaultPromptTemplate};
  std::optional<std::filesystem::path> text_embeddings;
  std::vector<FrameEntry> frames;
  std::optional<std::filesystem::path> source;

  static DatasetManifest load(const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_file_bytes(path));
    } catch (const nlohmann::json::exception& e) {
      detail::fail(ErrorCode::invalid_argument,
                   "manifest " + path.string() + " is not valid JSON: " + e.what());
    }
    auto m = from_json(doc, path.parent_path());
    m.source = path;
    return m;
  }

  static DatasetManifest from_json(const nlohmann::json& doc,
                                   const std::filesystem::path& base_dir) {
    DatasetManifest m;
    try {
      m.catalog = parse_catalog(doc.at("catalog"));
      m.prompt_template = doc.value("prompt_template", std::string(kDefaultPromptTemplate));
      if (doc.contains("text_embeddings")) {
        m.text_embeddings = resolve(base_dir, doc.at("text_embeddings").get<std::string>());
      }
      for (const auto& f : doc.at("frames")) {
        FrameEntry e;
        e.id = f.at("id").get<std::string>();
        e.class_index = f.at("class").get<ClassIndex>();
        if (f.contains("image")) e.image = resolve(base_dir, f.at("image").get<std::string>());
        if (f.contains("embedding")) {
          e.embedding = parse_ref(base_dir, f.at("embedding").get<std::string>(), e.id);
        }
        if (f.contains("masks")) {
          for (const auto& [name, p] : f.at("masks").items()) {
            e.masks.emplace(name, resolve(base_dir, p.get<std::string>()));
          }
        }
        if (f.contains("perturbed")) {
          for (const auto& [tag, r] : f.at("perturbed").items()) {
            e.perturbed.emplace(tag, parse_ref(base_dir, r.get<std::string>(), e.id + "@" + tag));
          }
        }
        m.frames.push_back(std::move(e));
      }
    } catch (const nlohmann::json::exception& e) {
      detail::fail(ErrorCode::invalid_argument, std::string("malformed manifest: ") + e.what());
    }
    m.validate();
    return m;
  }

  /// Structural checks plus existence of every referenced file.
  void validate() const {
    detail::require(catalog.size() >= 1, ErrorCode::invalid_argument, "catalog is empty");
    const auto placeholder = prompt_template.find("{class}");
    detail::require(placeholder != std::string::npos &&
                        prompt_template.find("{class}", placeholder + 1) == std::string::npos,
                    ErrorCode::invalid_argument,
                    "prompt_template must contain exactly one {class} placeholder");
    std::set<std::string> ids;
    std::vector<std::string> missing;
    auto check_file = [&](const std::filesystem::path& p) {
      if (!std::filesystem::exists(p)) missing.push_back(p.string());
    };
    for (const auto& f : frames) {
      detail::require(!f.id.empty() && f.id.front() != '#' &&
                          f.id.find_first_of("\t\r\n") == std::string::npos,
                      ErrorCode::invalid_argument, "invalid frame id '" + f.id + "'");
      detail::require(ids.insert(f.id).second, ErrorCode::invalid_argument,
                      "duplicate frame id '" + f.id + "'");
      detail::require(catalog.contains(f.class_index), ErrorCode::invalid_argument,
                      "frame " + f.id + " has class " + std::to_string(f.class_index) +
                          " outside the catalog");
      detail::require(f.image || f.embedding, ErrorCode::invalid_argument,
                      "frame " + f.id + " has neither an image nor an embedding");
      if (f.image) check_file(*f.image);
      if (f.embedding) check_file(f.embedding->file);
      for (const auto& [name, p] : f.masks) check_file(p);
      for (const auto& [tag, r] : f.perturbed) check_file(r.file);
    }
    if (text_embeddings) check_file(*text_embeddings);
    if (!missing.empty()) {
      std::string msg = "manifest references missing files:";
      for (const auto& m : missing) msg += " " + m;
      detail::fail(ErrorCode::invalid_argument, msg);
    }
  }

  std::string prompt_for(ClassIndex c) const {
    std::string out = prompt_template;
    out.replace(out.find("{class}"), 7, catalog.name(c));
    return out;
  }

  /// Every file the manifest points at, sorted and de-duplicated.
  std::vector<std::filesystem::path> referenced_files() const {
    std::set<std::filesystem::path> out;
    if (text_embeddings) {
      out.insert(*text_embeddings);
      out.insert(sidecar_path(*text_embeddings));
    }
    for (const auto& f : frames) {
      if (f.image) out.insert(*f.image);
      if (f.embedding) {
        out.insert(f.embedding->file);
        out.insert(sidecar_path(f.embedding->file));
      }
      for (const auto& [name, p] : f.masks) out.insert(p);
      for (const auto& [tag, r] : f.perturbed) {
        out.insert(r.file);
        out.insert(sidecar_path(r.file));
      }
    }
    return {out.begin(), out.end()};
  }

 private:
  static std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
  }

  static EmbeddingRef parse_ref(const std::filesystem::path& base, const std::string& text,
                                const std::string& default_key) {
    const auto hash = text.find('#');
    if (hash == std::string::npos) return {resolve(base, text), default_key};
    return {resolve(base, text.substr(0, hash)), text.substr(hash + 1)};
  }

  static ClassCatalog parse_catalog(const nlohmann::json& j) {
    if (j.is_string()) {
      detail::require(j.get<std::string>() == "ucf101", ErrorCode::invalid_argument,
                      "unknown named catalog '" + j.get<std::string>() + "'");
      return ucf101_catalog();
    }
    std::vector<std::pair<ClassIndex, std::string>> entries;
    for (const auto& e : j) {
      entries.emplace_back(e.at("index").get<ClassIndex>(), e.at("name").get<std::string>());
    }
    std::sort(entries.begin(), entries.end());
    std::vector<std::string> names;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      detail::require(entries[i].first == static_cast<ClassIndex>(i + 1),
                      ErrorCode::invalid_argument,
                      "catalog indices must be unique and contiguous from 1");
      names.push_back(entries[i].second);
    }
    return ClassCatalog(std::move(names));
  }
};

/// Loads each EMB1 file once and resolves references into it.
class EmbeddingCache {
 public:
  const Emb1Table& table(const std::filesystem::path& path) {
    const auto key = path.lexically_normal().string();
    auto it = tables_.find(key);
    if (it == tables_.end()) it = tables_.emplace(key, read_emb1(path)).first;
    return it->second;
  }

  const EmbeddingVector& lookup(const EmbeddingRef& ref) {
    const auto* row = table(ref.file).find(ref.key);
    detail::require(row != nullptr, ErrorCode::invalid_argument,
                    "no row '" + ref.key + "' in " + ref.file.string());
    return *row;
  }

 private:
  std::unordered_map<std::string, Emb1Table> tables_;
};

}  // namespace labeldisp
