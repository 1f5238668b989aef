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
// Command-line front end for the dispersion tasks.
//
//   labeldisp --manifest data.json [--config run.json] [--out DIR] [--seed N]
//             [--labels 1,2,3] <task1 | task2 | task3 | task4 | task5 train | task5 eval>
//
// Exit status: 0 on success, 2 when inputs fail validation, 3 when the
// embedding provider fails.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "labeldisp/labeldisp.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitProvider = 3;

struct Options {
  std::string manifest;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<labeldisp::ClassIndex> labels;
  std::string provider_dir;
  std::optional<double> provider_timeout;
  bool log_similarities = false;

  std::vector<double> percents;
  std::string strategy;
  std::string mode;
  std::string dict;
};

int run(const Options& opt, labeldisp::TaskKind task) {
  using namespace labeldisp;
  RunConfig cfg;
  if (!opt.config.empty()) cfg = RunConfig::load(opt.config);
  cfg.task = task;
  if (opt.seed) cfg.seed = *opt.seed;
  if (!opt.out.empty()) cfg.output_dir = opt.out;
  if (!opt.labels.empty()) cfg.labels = opt.labels;
  if (!opt.percents.empty()) cfg.percents = opt.percents;
  if (!opt.strategy.empty()) cfg.strategy = parse_random_strategy(opt.strategy);
  if (!opt.mode.empty()) cfg.feature_mode = parse_feature_mode(opt.mode);
  if (opt.log_similarities) cfg.log_similarities = true;
  if (!opt.provider_dir.empty()) {
    ProviderConfig pc = cfg.provider.value_or(ProviderConfig{});
    pc.request_dir = opt.provider_dir;
    cfg.provider = pc;
  }
  if (opt.provider_timeout) {
    detail::require(cfg.provider.has_value(), ErrorCode::invalid_argument,
                    "--provider-timeout needs a provider request directory");
    cfg.provider->timeout_seconds = *opt.provider_timeout;
  }

  std::unique_ptr<EmbeddingProvider> provider;
  if (cfg.provider) provider = std::make_unique<ExchangeDirectoryProvider>(*cfg.provider);

  Pipeline pipeline(DatasetManifest::load(opt.manifest), cfg, provider.get());
  std::optional<std::filesystem::path> dict;
  if (!opt.dict.empty()) dict = opt.dict;
  const auto summary = run_configured_task(pipeline, dict);
  std::cout << summary.text;
  for (const auto& dir : summary.outputs) std::cout << "wrote " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Label dispersion analysis for zero-shot video frame classification"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--manifest", opt.manifest, "Dataset manifest (JSON)")->required();
  app.add_option("--config", opt.config, "Run configuration (JSON)");
  app.add_option("--out", opt.out, "Output directory");
  app.add_option("--seed", opt.seed, "Base seed for masking, splitting and training");
  app.add_option("--labels", opt.labels, "Candidate label subset, e.g. 1,2,3")->delimiter(',');
  app.add_option("--provider-dir", opt.provider_dir, "Exchange directory of the embedding provider");
  app.add_option("--provider-timeout", opt.provider_timeout, "Seconds to wait for each provider batch");
  app.add_flag("--log-similarities", opt.log_similarities, "Write raw cosine similarities per frame");

  auto* task1 = app.add_subcommand("task1", "Classify unmodified frames");
  auto* task2 = app.add_subcommand("task2", "Random pixel or shape masking sweep");
  task2->add_option("--percents", opt.percents, "Masking percentages, e.g. 10,30,50")->delimiter(',');
  task2->add_option("--strategy", opt.strategy, "pixel or shape")
      ->check(CLI::IsMember({"pixel", "shape"}));
  auto* task3 = app.add_subcommand("task3", "Mask named features");
  task3->add_option("--mode", opt.mode, "one (each mask alone) or all (union)")
      ->check(CLI::IsMember({"one", "all"}));
  auto* task4 = app.add_subcommand("task4", "Keep only the class-defining region");
  auto* task5 = app.add_subcommand("task5", "Class-specific noise");
  task5->require_subcommand(1);
  auto* train = task5->add_subcommand("train", "Learn the noise dictionary");
  auto* eval = task5->add_subcommand("eval", "Compare predictions without and with noise");
  eval->add_option("--dict", opt.dict, "Noise dictionary (EMB1)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  labeldisp::TaskKind task = labeldisp::TaskKind::task1;
  if (*task2) task = labeldisp::TaskKind::task2;
  if (*task3) task = labeldisp::TaskKind::task3;
  if (*task4) task = labeldisp::TaskKind::task4;
  if (*train) task = labeldisp::TaskKind::task5_train;
  if (*eval) task = labeldisp::TaskKind::task5_eval;
  (void)task1;

  try {
    return run(opt, task);
  } catch (const labeldisp::Error& e) {
    std::cerr << "labeldisp: " << labeldisp::to_string(e.code()) << ": " << e.what() << "\n";
    return e.code() == labeldisp::ErrorCode::provider ? kExitProvider : kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "labeldisp: i/o error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "labeldisp: internal error: " << e.what() << "\n";
    return 1;
  }
}
