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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "labeldisp/labeldisp.hpp"

namespace labeldisp::testing {

/// Fresh directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::uint64_t counter = 0;
    Rng rng(derive_seed(static_cast<std::uint64_t>(
                            std::filesystem::file_time_type::clock::now().time_since_epoch().count()),
                        tag + std::to_string(++counter)));
    path_ = std::filesystem::temp_directory_path() /
            ("labeldisp-" + tag + "-" + std::to_string(rng.next() % 1000000000ULL));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

/// Standard normal draw (Box-Muller on two uniform draws).
inline double gaussian(Rng& rng) {
  const double u1 = 1.0 - rng.unit();
  const double u2 = rng.unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline EmbeddingVector random_vector(Rng& rng, std::size_t dim, double scale = 1.0) {
  std::vector<double> v(dim);
  for (double& x : v) x = rng.uniform(-scale, scale);
  return EmbeddingVector(std::move(v));
}

inline EmbeddingVector unit_axis(std::size_t dim, std::size_t axis, double value = 1.0) {
  std::vector<double> v(dim, 0.0);
  v[axis] = value;
  return EmbeddingVector(std::move(v));
}

inline ImageFrame random_frame(Rng& rng, int w, int h, bool allow_black = false) {
  std::vector<Rgb> px(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (auto& p : px) {
    do {
      p = {static_cast<std::uint8_t>(rng.below(256)), static_cast<std::uint8_t>(rng.below(256)),
           static_cast<std::uint8_t>(rng.below(256))};
    } while (!allow_black && p.is_black());
  }
  return ImageFrame(w, h, std::move(px));
}

inline PredictionRecord record(const std::string& id, ClassIndex gt, ClassIndex pred, double conf,
                               const std::string& tag = "") {
  return {id, gt, pred, conf, tag};
}

/// `count` records predicting `pred` with confidence `conf` for ground truth `gt`.
inline std::vector<PredictionRecord> replay(ClassIndex gt, ClassIndex pred, std::size_t count,
                                            double conf, const std::string& prefix = "f") {
  std::vector<PredictionRecord> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(record(prefix + std::to_string(out.size()) + "_" + std::to_string(pred), gt, pred,
                         conf));
  }
  return out;
}

/// Writes an EMB1 table keyed by the given ids.
inline void write_table(const std::filesystem::path& path, const std::vector<std::string>& ids,
                        const std::vector<EmbeddingVector>& rows) {
  Emb1Table t;
  for (std::size_t i = 0; i < ids.size(); ++i) t.add(ids[i], rows[i]);
  write_emb1(path, t);
}

}  // namespace labeldisp::testing
