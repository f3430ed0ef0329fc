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

// Command-line entry point: auction, train and eval subcommands.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dala/auction_io.h"
#include "dala/config.h"
#include "dala/market.h"
#include "dala/telemetry.h"
#include "dala/trainer.h"
#include "dala/workflows.h"

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

int RunAuctionCommand(const std::string& instance_path,
                      const std::string& output_path) {
  std::ifstream in(instance_path);
  if (!in) {
    std::cerr << "error: cannot open " << instance_path << "\n";
    return kRuntimeError;
  }
  nlohmann::json document;
  try {
    in >> document;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << instance_path << ": " << e.what() << "\n";
    return kUsageError;
  }
  const dala::AuctionInstance instance = dala::ParseAuctionInstance(document);
  const dala::AuctionOutcome outcome =
      dala::RunAuction(instance.bids, instance.b_max);
  const std::string text = dala::ToJson(outcome).dump(2) + "\n";
  if (output_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output_path, std::ios::out | std::ios::trunc);
    if (!out) {
      std::cerr << "error: cannot write " << output_path << "\n";
      return kRuntimeError;
    }
    out << text;
  }
  return 0;
}

int RunTrainCommand(const std::string& config_path,
                    std::optional<std::uint64_t> seed, int workers,
                    const std::string& budget_override) {
  dala::RunConfig config = dala::LoadRunConfig(config_path);
  if (seed) config.seed = *seed;
  if (!budget_override.empty()) {
    const dala::BudgetOverride o = dala::ParseBudgetOverride(budget_override);
    config.budget.episode_budget = o.episode_budget;
    config.budget.hard_cap = o.hard_cap;
  }
  const dala::TrainArtifacts artifacts =
      dala::RunTrainWorkflow(config, workers, dala::RunRoot());
  std::cout << "run directory: " << artifacts.run_dir.string() << "\n"
            << "config hash:   " << dala::ConfigHash(config) << "\n";
  const auto& epochs = artifacts.result.epochs;
  if (!epochs.empty()) {
    const dala::EpochStats& first = epochs.front();
    const dala::EpochStats& last = epochs.back();
    std::cout << "value gap:     " << dala::FormatDouble(first.value_gap.gap)
              << " -> " << dala::FormatDouble(last.value_gap.gap) << "\n"
              << "tokens/episode " << dala::FormatDouble(last.tokens_per_episode)
              << ", success rate " << dala::FormatDouble(last.success_rate)
              << " at the final epoch\n";
  }
  return 0;
}

int RunEvalCommand(const std::string& checkpoint_path,
                   const std::string& config_path,
                   std::optional<std::uint64_t> seed, int workers,
                   const std::vector<std::string>& overrides, int episodes) {
  const dala::Checkpoint checkpoint = dala::LoadCheckpoint(checkpoint_path);
  const dala::RunConfig config = dala::LoadRunConfig(config_path);
  std::vector<dala::BudgetOverride> budgets;
  for (const std::string& text : overrides) {
    budgets.push_back(dala::ParseBudgetOverride(text));
  }
  dala::EvalOptions options;
  options.episodes = episodes;
  options.workers = workers;
  options.seed = seed.value_or(config.seed);
  const dala::EvalArtifacts artifacts = dala::RunEvalWorkflow(
      checkpoint, config, budgets, options, dala::RunRoot());
  std::cout << "eval directory: " << artifacts.eval_dir.string() << "\n";
  std::printf("%8s %6s %8s %9s %7s %7s %7s %7s\n", "episode", "cap",
              "success", "tokens/ep", "full", "summary", "keyword", "silence");
  for (const dala::EvalSummary& s : artifacts.summaries) {
    std::printf("%8lld %6lld %8.3f %9.2f %7.3f %7.3f %7.3f %7.3f\n",
                static_cast<long long>(s.episode_budget),
                static_cast<long long>(s.hard_cap), s.success_rate,
                s.tokens.per_episode_mean, s.broadcast.Of(dala::Tier::kFull),
                s.broadcast.Of(dala::Tier::kSummary),
                s.broadcast.Of(dala::Tier::kKeywords),
                s.broadcast.Of(dala::Tier::kSilence));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DALA communication market: auction solver, trainer and "
               "evaluator"};
  app.require_subcommand(1);

  std::string instance_path, output_path;
  auto* auction = app.add_subcommand("auction", "Clear one auction instance");
  auction->add_option("instance", instance_path, "Auction instance JSON")
      ->required();
  auction->add_option("-o,--output", output_path,
                      "Write the outcome here instead of stdout");

  std::string config_path, checkpoint_path;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  auto* train = app.add_subcommand("train", "Train policies and value nets");
  train->add_option("config", config_path, "Run config JSON")->required();
  train->add_option("--seed", seed, "Override the config seed");
  train->add_option("--workers", workers, "Episode worker threads")
      ->check(CLI::PositiveNumber);
  std::string train_override;
  train->add_option("--budget-override", train_override,
                    "EPISODE:CAP training budget");

  std::vector<std::string> overrides;
  int episodes = 256;
  auto* eval = app.add_subcommand("eval", "Evaluate a frozen checkpoint");
  eval->add_option("checkpoint", checkpoint_path, "checkpoint.json")
      ->required();
  eval->add_option("config", config_path, "Run config JSON")->required();
  eval->add_option("--seed", seed, "Evaluation seed (default: config seed)");
  eval->add_option("--workers", workers, "Episode worker threads")
      ->check(CLI::PositiveNumber);
  eval->add_option("--budget-override", overrides,
                   "EPISODE:CAP budget condition; repeatable");
  eval->add_option("--episodes", episodes, "Episodes per condition")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*auction) return RunAuctionCommand(instance_path, output_path);
    if (*train) {
      return RunTrainCommand(config_path, seed, workers, train_override);
    }
    if (*eval) {
      return RunEvalCommand(checkpoint_path, config_path, seed, workers,
                            overrides, episodes);
    }
  } catch (const dala::ConfigError& e) {
    std::cerr << "error: invalid config\n";
    for (const std::string& problem : e.problems()) {
      std::cerr << "  " << problem << "\n";
    }
    return kUsageError;
  } catch (const dala::AuctionFormatError& e) {
    std::cerr << "error: invalid auction instance: " << e.what() << "\n";
    return kUsageError;
  } catch (const dala::IncompatibleCheckpoint& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}
