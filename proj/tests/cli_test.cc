// Copyright 2026 The DALA Market Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Runs the installed command line tool end to end.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "gtest/gtest.h"

namespace {

namespace fs = std::filesystem;

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dala_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Exit status of `dala <args>` with the run root inside the temp dir.
  int Run(const std::string& args, const std::string& root = "runs") {
    const std::string cmd = "cd '" + dir_.string() + "' && DALA_RUN_ROOT='" +
                            (dir_ / root).string() + "' '" DALA_CLI_PATH "' " +
                            args + " > out.txt 2> err.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string Stdout() const { return ReadFile(dir_ / "out.txt"); }
  std::string Stderr() const { return ReadFile(dir_ / "err.txt"); }

  fs::path SmallConfig(const std::string& name, const std::string& run_id) {
    nlohmann::json doc = nlohmann::json::parse(
        ReadFile(fs::path(DALA_CONFIG_DIR) / "default.json"));
    doc["run_id"] = run_id;
    doc["training"]["epochs"] = 2;
    doc["training"]["episodes_per_epoch"] = 4;
    doc["training"]["update_iters"] = 2;
    const fs::path path = dir_ / name;
    WriteFile(path, doc.dump(2));
    return path;
  }

  fs::path dir_;
};

TEST_F(CliTest, AuctionThreeBidExample) {
  WriteFile(dir_ / "inst.json", R"({"b_max": 6, "bids": [
      {"agent_id": 0, "bid_value": 3.0, "message_len": 4},
      {"agent_id": 1, "bid_value": 2.0, "message_len": 3},
      {"agent_id": 2, "bid_value": 2.0, "message_len": 3}]})");
  ASSERT_EQ(Run("auction inst.json"), 0) << Stderr();
  const nlohmann::json out = nlohmann::json::parse(Stdout());
  EXPECT_EQ(out.at("winners"), nlohmann::json::array({1, 2}));
  EXPECT_DOUBLE_EQ(out.at("payments").at("1").get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(out.at("payments").at("2").get<double>(), 1.0);
  EXPECT_EQ(out.at("total_cost"), 6);
  EXPECT_DOUBLE_EQ(out.at("total_value").get<double>(), 4.0);
  ASSERT_EQ(Run("auction inst.json -o result.json"), 0);
  EXPECT_EQ(nlohmann::json::parse(ReadFile(dir_ / "result.json")), out);
}

TEST_F(CliTest, AuctionRejectsMalformedInput) {
  WriteFile(dir_ / "broken.json", "{\"b_max\": 6, \"bids\": [");
  EXPECT_EQ(Run("auction broken.json"), 2);
  WriteFile(dir_ / "nokey.json", R"({"bids": []})");
  EXPECT_EQ(Run("auction nokey.json"), 2);
  EXPECT_NE(Stderr().find("b_max"), std::string::npos);
  WriteFile(dir_ / "neg.json",
            R"({"b_max": 6, "bids": [{"agent_id": 0, "bid_value": -1.0, "message_len": 4}]})");
  EXPECT_EQ(Run("auction neg.json"), 2);
  EXPECT_EQ(Run("auction missing.json"), 1);
  EXPECT_NE(Run("frobnicate"), 0);
}

TEST_F(CliTest, TrainRejectsBadConfig) {
  nlohmann::json doc = nlohmann::json::parse(
      ReadFile(fs::path(DALA_CONFIG_DIR) / "default.json"));
  doc["training"].erase("alpha");
  doc["bogus"] = true;
  WriteFile(dir_ / "bad.json", doc.dump());
  EXPECT_EQ(Run("train bad.json"), 2);
  EXPECT_NE(Stderr().find("training.alpha: missing key"), std::string::npos);
  EXPECT_NE(Stderr().find("bogus: unknown key"), std::string::npos);
}

TEST_F(CliTest, TrainThenEvalWritesArtifacts) {
  const fs::path config = SmallConfig("small.json", "small");
  ASSERT_EQ(Run("train small.json --seed 3"), 0) << Stderr();
  const fs::path run = dir_ / "runs" / "small";
  for (const char* f : {"rounds.jsonl", "epochs.csv", "summary.csv", "checkpoint.json"}) {
    EXPECT_TRUE(fs::exists(run / f)) << f;
  }
  const nlohmann::json ckpt = nlohmann::json::parse(ReadFile(run / "checkpoint.json"));
  EXPECT_EQ(ckpt.at("seed"), 3);

  ASSERT_EQ(Run("eval runs/small/checkpoint.json small.json --episodes 8 "
                "--budget-override 32:8 --budget-override 320:80"),
            0)
      << Stderr();
  EXPECT_TRUE(fs::exists(run / "eval" / "rounds_32_8.jsonl"));
  EXPECT_TRUE(fs::exists(run / "eval" / "rounds_320_80.jsonl"));
  const std::string summary = ReadFile(run / "eval" / "summary.csv");
  EXPECT_NE(summary.find(",32,8,"), std::string::npos) << summary;
  EXPECT_EQ(Run("eval runs/small/checkpoint.json small.json --budget-override 32"), 1);
}

TEST_F(CliTest, EvalRejectsIncompatibleConfig) {
  SmallConfig("small.json", "small");
  ASSERT_EQ(Run("train small.json"), 0) << Stderr();
  nlohmann::json doc = nlohmann::json::parse(ReadFile(dir_ / "small.json"));
  doc["env"]["num_shards"] = 12;
  WriteFile(dir_ / "other.json", doc.dump());
  EXPECT_EQ(Run("eval runs/small/checkpoint.json other.json --episodes 4"), 2);
}

TEST_F(CliTest, RerunsAreByteIdentical) {
  SmallConfig("small.json", "small");
  ASSERT_EQ(Run("train small.json --workers 2", "a"), 0) << Stderr();
  ASSERT_EQ(Run("train small.json", "b"), 0) << Stderr();
  for (const char* f : {"rounds.jsonl", "epochs.csv", "summary.csv", "checkpoint.json"}) {
    const std::string a = ReadFile(dir_ / "a" / "small" / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, ReadFile(dir_ / "b" / "small" / f)) << f;
  }
  const std::string eval = "eval a/small/checkpoint.json small.json --episodes 8 "
                           "--budget-override 32:8";
  ASSERT_EQ(Run(eval, "a"), 0);
  ASSERT_EQ(Run(eval, "b"), 0);
  EXPECT_EQ(ReadFile(dir_ / "a" / "small" / "eval" / "rounds_32_8.jsonl"),
            ReadFile(dir_ / "b" / "small" / "eval" / "rounds_32_8.jsonl"));
}

}  // namespace
