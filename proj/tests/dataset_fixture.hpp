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

// Small on-disk datasets for pipeline tests: solid-colour frames whose
// embeddings come from a colour-summary encoder, so precomputed embeddings and
// provider answers agree for unmodified frames.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "labeldisp/labeldisp.hpp"
#include "support.hpp"

namespace labeldisp::testing {

/// Mean colour per channel in [0, 1] plus a constant fourth component, which
/// keeps the all-black frame away from the zero vector. Values are rounded to
/// float so they survive an EMB1 round trip unchanged.
inline EmbeddingVector colour_encoder(const ImageFrame& frame) {
  double r = 0, g = 0, b = 0;
  for (const auto& p : frame.pixels()) {
    r += p.r;
    g += p.g;
    b += p.b;
  }
  const double n = 255.0 * static_cast<double>(frame.area());
  // volatile: GCC 11's SLP vectorizer at -O3 drops a plain double->float->double.
  auto f = [](double v) {
    volatile float narrow = static_cast<float>(v);
    return static_cast<double>(narrow);
  };
  return EmbeddingVector{f(r / n), f(g / n), f(b / n), f(0.05)};
}

/// Classes 1..3 are red, green, blue; class 4 is "dark".
inline std::vector<EmbeddingVector> colour_texts() {
  return {{1.0, 0.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0}, {0.0, 0.0, 1.0, 0.0}, {0.0, 0.0, 0.0, 1.0}};
}

inline Rgb class_colour(ClassIndex c, std::uint8_t level = 200) {
  switch (c) {
    case 1: return {level, 20, 20};
    case 2: return {20, level, 20};
    default: return {20, 20, level};
  }
}

struct FrameFixture {
  std::string id;
  ClassIndex class_index;
  ImageFrame image;
  std::map<std::string, SegmentationMask> masks;
  bool with_embedding = true;
  bool with_image = true;
};

/// Writes frames, masks, EMB1 tables and a manifest under `root`.
class DatasetWriter {
 public:
  explicit DatasetWriter(std::filesystem::path root) : root_(std::move(root)) {}

  std::vector<std::string> class_names{"Red", "Green", "Blue", "Dark"};
  std::vector<EmbeddingVector> texts = colour_texts();
  std::vector<FrameFixture> frames;
  /// Precomputed perturbed embeddings: tag -> frame id -> embedding.
  std::map<std::string, std::map<std::string, EmbeddingVector>> perturbed;
  nlohmann::json extra = nlohmann::json::object();

  std::filesystem::path write() const {
    nlohmann::json catalog = nlohmann::json::array();
    for (std::size_t i = 0; i < class_names.size(); ++i) {
      catalog.push_back({{"index", i + 1}, {"name", class_names[i]}});
    }
    std::vector<std::string> text_ids;
    for (std::size_t i = 0; i < texts.size(); ++i) text_ids.push_back(std::to_string(i + 1));
    write_table(root_ / "texts.emb", text_ids, texts);

    Emb1Table frame_table;
    Emb1Table perturbed_table;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& f : frames) {
      nlohmann::json e = {{"id", f.id}, {"class", f.class_index}};
      if (f.with_image) {
        write_frame_png(root_ / "frames" / (f.id + ".png"), f.image);
        e["image"] = "frames/" + f.id + ".png";
      }
      if (f.with_embedding) {
        frame_table.add(f.id, colour_encoder(f.image));
        e["embedding"] = "frames.emb";
      }
      for (const auto& [name, m] : f.masks) {
        const auto rel = "masks/" + f.id + "_" + name + ".png";
        write_mask_png(root_ / rel, m);
        e["masks"][name] = rel;
      }
      for (const auto& [tag, by_id] : perturbed) {
        const auto it = by_id.find(f.id);
        if (it == by_id.end()) continue;
        const auto key = f.id + "@" + tag;
        perturbed_table.add(key, it->second);
        e["perturbed"][tag] = "perturbed.emb#" + key;
      }
      entries.push_back(std::move(e));
    }
    if (frame_table.size() > 0) write_emb1(root_ / "frames.emb", frame_table);
    if (perturbed_table.size() > 0) write_emb1(root_ / "perturbed.emb", perturbed_table);

    nlohmann::json doc = {{"catalog", catalog},
                          {"prompt_template", "a photo of {class}"},
                          {"text_embeddings", "texts.emb"},
                          {"frames", entries}};
    doc.update(extra);
    write_file_bytes(root_ / "manifest.json", doc.dump(2));
    return root_ / "manifest.json";
  }

 private:
  std::filesystem::path root_;
};

/// `per_class` solid frames for each of classes 1..3 with slightly varying
/// brightness, sized w x h.
inline std::vector<FrameFixture> colour_frames(std::size_t per_class, int w = 12, int h = 10) {
  std::vector<FrameFixture> out;
  for (ClassIndex c = 1; c <= 3; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      const auto level = static_cast<std::uint8_t>(150 + (i * 7) % 100);
      out.push_back({"c" + std::to_string(c) + "_" + std::to_string(i), c,
                     ImageFrame(w, h, class_colour(c, level)), {}});
    }
  }
  return out;
}

/// Background provider that serves exchange batches until destroyed.
class ExchangeStub {
 public:
  ExchangeStub(std::filesystem::path dir, FunctionProvider::Fn fn)
      : thread_([dir = std::move(dir), fn = std::move(fn)](std::stop_token stop) {
          while (!stop.stop_requested()) {
            if (serve_pending_batches(dir, fn) == 0) {
              std::this_thread::sleep_for(std::chrono::milliseconds(2));
            }
          }
        }) {}

 private:
  std::jthread thread_;
};

}  // namespace labeldisp::testing
