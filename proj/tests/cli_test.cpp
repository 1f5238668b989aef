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
#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include <gtest/gtest.h>

#include "dataset_fixture.hpp"
#include "labeldisp/labeldisp.hpp"

namespace labeldisp {
namespace {

using testing::TempDir;

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  TempDir dir{"cli"};
  testing::DatasetWriter writer{dir / "data"};

  void SetUp() override {
    writer.frames = testing::colour_frames(5);
    for (auto& f : writer.frames) {
      f.masks.emplace("grass", SegmentationMask(12, 10, false));
      f.masks.emplace("keep", SegmentationMask(12, 10, true));
    }
    writer.write();
  }

  Outcome run(const std::string& args) {
    const auto out = dir / "stdout.txt";
    const auto err = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + LABELDISP_CLI_PATH + "\" --manifest \"" +
                            (dir / "data" / "manifest.json").string() + "\" " + args + " >\"" +
                            out.string() + "\" 2>\"" + err.string() + "\"";
    const int raw = std::system(cmd.c_str());
    Outcome o{WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, "", ""};
    if (std::filesystem::exists(out)) o.out = read_file_bytes(out);
    if (std::filesystem::exists(err)) o.err = read_file_bytes(err);
    return o;
  }

  std::string out_dir() const { return "\"" + (dir / "out").string() + "\""; }
};

TEST_F(CliTest, Task1WritesReport) {
  const auto o = run("--out " + out_dir() + " task1");
  ASSERT_EQ(o.status, 0) << o.err;
  EXPECT_NE(o.out.find("1\tRed\t1 (5, 1.00)"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "task1" / "report.json"));
}

TEST_F(CliTest, LabelsAndSeedReachTheConfig) {
  const auto o = run("--out " + out_dir() + " --seed 17 --labels 1,2 task1");
  ASSERT_EQ(o.status, 0) << o.err;
  const auto doc = nlohmann::json::parse(read_file_bytes(dir / "out" / "task1" / "report.json"));
  EXPECT_EQ(doc.at("metadata").at("config").at("seed"), 17);
  EXPECT_EQ(doc.at("metadata").at("config").at("labels"), nlohmann::json({1, 2}));
}

TEST_F(CliTest, Task2NeedsAProvider) {
  const auto o = run("--out " + out_dir() + " task2 --percents 10,30 --strategy shape");
  EXPECT_EQ(o.status, 2);
  EXPECT_NE(o.err.find("shape/p10"), std::string::npos);
}

TEST_F(CliTest, Task2ThroughExchangeDirectory) {
  testing::ExchangeStub stub(dir / "exchange", [](const std::string&, const ImageFrame& f) {
    return testing::colour_encoder(f);
  });
  const auto o = run("--out " + out_dir() + " --provider-dir \"" + (dir / "exchange").string() +
                     "\" task2 --percents 10,30 --strategy pixel");
  ASSERT_EQ(o.status, 0) << o.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "task2" / "pixel" / "p10" / "rows.tsv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "task2" / "pixel" / "p30" / "rows.tsv"));
}

TEST_F(CliTest, ProviderTimeoutExitsThree) {
  const auto o = run("--out " + out_dir() + " --provider-dir \"" + (dir / "exchange").string() +
                     "\" --provider-timeout 0.1 task4");
  EXPECT_EQ(o.status, 3);
  EXPECT_NE(o.err.find("provider"), std::string::npos);
}

TEST_F(CliTest, Task3Modes) {
  testing::ExchangeStub stub(dir / "exchange", [](const std::string&, const ImageFrame& f) {
    return testing::colour_encoder(f);
  });
  const auto provider = " --provider-dir \"" + (dir / "exchange").string() + "\" ";
  ASSERT_EQ(run("--out " + out_dir() + provider + "task3 --mode one").status, 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "task3" / "grass" / "rows.tsv"));
  ASSERT_EQ(run("--out " + out_dir() + provider + "task3 --mode all").status, 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "task3" / "all" / "rows.tsv"));
  EXPECT_EQ(run("--out " + out_dir() + provider + "task3 --mode some").status, 2);
}

TEST_F(CliTest, Task5TrainThenEval) {
  ASSERT_EQ(run("--out " + out_dir() + " task5 train").status, 0);
  const auto dict = dir / "out" / "task5" / "noise.emb";
  ASSERT_TRUE(std::filesystem::exists(dict));
  const auto o = run("--out " + out_dir() + " task5 eval --dict \"" + dict.string() + "\"");
  ASSERT_EQ(o.status, 0) << o.err;
  EXPECT_NE(o.out.find("# with_noise"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "task5_eval" / "report.json"));
}

TEST_F(CliTest, ValidationFailuresExitTwo) {
  EXPECT_EQ(run("task9").status, 2);
  EXPECT_EQ(run("task5").status, 2);
  EXPECT_EQ(run("task5 eval").status, 2);
  EXPECT_EQ(run("--labels 1 task1").status, 2);
  EXPECT_EQ(run("--out " + out_dir() + " task5 eval --dict nowhere.emb").status, 2);
  write_file_bytes(dir / "bad.json", "{\"seed\": \"x\"}");
  EXPECT_EQ(run("--config \"" + (dir / "bad.json").string() + "\" task1").status, 2);
  EXPECT_EQ(run("task2 --strategy blur").status, 2);
}

TEST_F(CliTest, ConfigFileIsOverlaidByFlags) {
  write_file_bytes(dir / "run.json", R"({"seed": 5, "mask": {"percents": [20]}})");
  const auto o = run("--config \"" + (dir / "run.json").string() + "\" --seed 6 --out " + out_dir() +
                     " task1");
  ASSERT_EQ(o.status, 0) << o.err;
  const auto doc = nlohmann::json::parse(read_file_bytes(dir / "out" / "task1" / "report.json"));
  EXPECT_EQ(doc.at("metadata").at("config").at("seed"), 6);
  EXPECT_EQ(doc.at("metadata").at("config").at("mask").at("percents"), nlohmann::json({20.0}));
}

}  // namespace
}  // namespace labeldisp
