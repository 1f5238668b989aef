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

// Embedding providers turn perturbed frames into image embeddings.
//
// Exchange directory protocol. For every batch the pipeline creates
// `<request_dir>/req-NNNNNN/` holding
//
//   frames/<n>.png   one PNG per frame
//   index.tsv        "<frame id>\t<png path relative to the batch dir>" per line
//   READY            written last; the batch is complete once it exists
//
// and then waits. The provider answers in the same directory with
//
//   response.emb     EMB1 rows, response.emb.ids listing the same frame ids
//   DONE             written last
//
// or writes FAILED (its contents are the reason). No answer within the
// timeout is a provider failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "labeldisp/core/error.hpp"
#include "labeldisp/core/files.hpp"
#include "labeldisp/embedding/emb1.hpp"
#include "labeldisp/embedding/embedding.hpp"
#include "labeldisp/masking/image.hpp"
#include "labeldisp/masking/png_io.hpp"
#include "labeldisp/pipeline/run_config.hpp"

namespace labeldisp {

struct EmbeddingRequest {
  std::string id;
  ImageFrame frame;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  /// One embedding per request, in request order.
  virtual std::vector<EmbeddingVector> embed(std::span<const EmbeddingRequest> requests) = 0;
};

/// In-process provider backed by a function; used by tests and embedding code.
class FunctionProvider final : public EmbeddingProvider {
 public:
  using Fn = std::function<EmbeddingVector(const std::string& id, const ImageFrame& frame)>;

  explicit FunctionProvider(Fn fn) : fn_(std::move(fn)) {}

  std::vector<EmbeddingVector> embed(std::span<const EmbeddingRequest> requests) override {
    std::vector<EmbeddingVector> out;
    out.reserve(requests.size());
    for (const auto& r : requests) out.push_back(fn_(r.id, r.frame));
    return out;
  }

 private:
  Fn fn_;
};

inline constexpr std::string_view kExchangeIndex = "index.tsv";
inline constexpr std::string_view kExchangeReady = "READY";
inline constexpr std::string_view kExchangeDone = "DONE";
inline constexpr std::string_view kExchangeFailed = "FAILED";
inline constexpr std::string_view kExchangeResponse = "response.emb";

namespace detail {

// Writes through a temporary name so readers never see a partial marker.
inline void write_marker(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  write_file_bytes(tmp, contents);
  std::filesystem::rename(tmp, path);
}

inline std::vector<std::pair<std::string, std::string>> parse_exchange_index(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    require(tab != std::string::npos, ErrorCode::format, "index line without a tab: " + line);
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

}  // namespace detail

/// Client side of the exchange directory protocol.
class ExchangeDirectoryProvider final : public EmbeddingProvider {
 public:
  explicit ExchangeDirectoryProvider(ProviderConfig cfg) : cfg_(std::move(cfg)) {
    detail::require(!cfg_.request_dir.empty(), ErrorCode::invalid_argument,
                    "provider request directory not set");
  }

  std::vector<EmbeddingVector> embed(std::span<const EmbeddingRequest> requests) override {
    if (requests.empty()) return {};
    const auto batch = next_batch_dir();
    std::string index;
    for (std::size_t i = 0; i < requests.size(); ++i) {
      detail::require(requests[i].id.find_first_of("\t\r\n") == std::string::npos,
                      ErrorCode::invalid_argument, "request id contains a tab or newline");
      char name[32];
      std::snprintf(name, sizeof name, "frames/%06zu.png", i);
      write_frame_png(batch / name, requests[i].frame);
      index += requests[i].id + "\t" + name + "\n";
    }
    write_file_bytes(batch / kExchangeIndex, index);
    detail::write_marker(batch / kExchangeReady, "");
    return await_response(batch, requests);
  }

 private:
  std::filesystem::path next_batch_dir() {
    std::filesystem::create_directories(cfg_.request_dir);
    for (;;) {
      char name[32];
      std::snprintf(name, sizeof name, "req-%06d", ++sequence_);
      const auto dir = cfg_.request_dir / name;
      if (std::filesystem::create_directory(dir)) return dir;
    }
  }

  std::vector<EmbeddingVector> await_response(const std::filesystem::path& batch,
                                              std::span<const EmbeddingRequest> requests) const {
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration<double>(cfg_.timeout_seconds);
    for (;;) {
      if (std::filesystem::exists(batch / kExchangeFailed)) {
        std::string why;
        try {
          why = read_file_bytes(batch / kExchangeFailed);
        } catch (const Error&) {
        }
        detail::fail(ErrorCode::provider, "provider failed on " + batch.string() + ": " + why);
      }
      if (std::filesystem::exists(batch / kExchangeDone)) break;
      if (std::chrono::steady_clock::now() >= deadline) {
        detail::fail(ErrorCode::provider, "no provider response for " + batch.string() +
                                              " within " + std::to_string(cfg_.timeout_seconds) +
                                              " s");
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.poll_interval_ms));
    }

    Emb1Table table;
    try {
      table = read_emb1(batch / kExchangeResponse);
    } catch (const Error& e) {
      detail::fail(ErrorCode::provider, std::string("unreadable provider response: ") + e.what());
    }
    std::vector<EmbeddingVector> out;
    out.reserve(requests.size());
    for (const auto& r : requests) {
      const auto* row = table.find(r.id);
      detail::require(row != nullptr, ErrorCode::provider,
                      "provider response lacks frame '" + r.id + "'");
      out.push_back(*row);
    }
    return out;
  }

  ProviderConfig cfg_;
  int sequence_ = 0;
};

// Provider side of the protocol.

/// Batches that are READY but not yet answered, in name order.
inline std::vector<std::filesystem::path> pending_exchange_batches(
    const std::filesystem::path& request_dir) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(request_dir)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(request_dir)) {
    const auto& dir = entry.path();
    if (!entry.is_directory()) continue;
    if (std::filesystem::exists(dir / kExchangeReady) &&
        !std::filesystem::exists(dir / kExchangeDone) &&
        !std::filesystem::exists(dir / kExchangeFailed)) {
      out.push_back(dir);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Answers one batch with `embed`. Any failure is reported through FAILED.
inline void serve_exchange_batch(const std::filesystem::path& batch,
                                 const FunctionProvider::Fn& embed) {
  try {
    const auto index = detail::parse_exchange_index(read_file_bytes(batch / kExchangeIndex));
    Emb1Table table;
    for (const auto& [id, png] : index) table.add(id, embed(id, read_frame_png(batch / png)));
    write_emb1(batch / kExchangeResponse, table);
    detail::write_marker(batch / kExchangeDone, "");
  } catch (const std::exception& e) {
    detail::write_marker(batch / kExchangeFailed, e.what());
  }
}

/// Serves every pending batch once; returns how many were handled.
inline std::size_t serve_pending_batches(const std::filesystem::path& request_dir,
                                         const FunctionProvider::Fn& embed) {
  const auto batches = pending_exchange_batches(request_dir);
  for (const auto& b : batches) serve_exchange_batch(b, embed);
  return batches.size();
}

}  // namespace labeldisp
