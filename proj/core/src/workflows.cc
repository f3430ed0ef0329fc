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

#include "dala/workflows.h"

#include <charconv>
#include <cstdlib>
#include <stdexcept>

#include "dala/telemetry.h"

namespace dala {
namespace {

const std::vector<std::string> kEpochColumns = {
    "config_hash",      "epoch",          "mean_v_critical",
    "mean_v_noncritical", "value_gap",    "tokens_per_episode",
    "success_rate",     "mean_team_reward", "policy_objective",
    "critic_loss",      "value_loss",     "entropy",
    "first_ratio_deviation", "full",      "summary",
    "keywords",         "silence"};

void AddStrategy(CsvTable& table, const StrategyDistribution& d) {
  for (Tier tier : kAllTiers) table.Add(d.Of(tier));
}

Tokens ParseTokens(std::string_view text, std::string_view whole) {
  Tokens value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || value < 0) {
    throw std::invalid_argument("budget override \"" + std::string(whole) +
                                "\" must be EPISODE:CAP with non-negative "
                                "integers");
  }
  return value;
}

}  // namespace

std::filesystem::path RunRoot() {
  const char* root = std::getenv("DALA_RUN_ROOT");
  return root != nullptr && *root != '\0' ? std::filesystem::path(root)
                                          : std::filesystem::path("runs");
}

std::filesystem::path RunDirectory(const std::filesystem::path& root,
                                   const std::string& run_id) {
  if (run_id.empty() || run_id == "." || run_id == ".." ||
      run_id.find_first_of("/\\") != std::string::npos) {
    throw std::invalid_argument("invalid run_id \"" + run_id + "\"");
  }
  return root / run_id;
}

TrainArtifacts RunTrainWorkflow(const RunConfig& config, int workers,
                                const std::filesystem::path& run_root) {
  ValidateRunConfig(config);
  TrainArtifacts artifacts;
  artifacts.run_dir = RunDirectory(run_root, config.run_id);
  std::filesystem::create_directories(artifacts.run_dir);
  const std::string hash = ConfigHash(config);

  JsonlWriter rounds(artifacts.run_dir / "rounds.jsonl", hash);
  CsvTable epochs(kEpochColumns);
  TrainingOptions options;
  options.workers = workers;
  options.sink = [&](const EpochStats& s, std::span<const RoundRecord> records) {
    for (const RoundRecord& r : records) rounds.Write(r);
    epochs.Row()
        .Add(hash)
        .Add(s.epoch)
        .Add(s.value_gap.mean_critical)
        .Add(s.value_gap.mean_noncritical)
        .Add(s.value_gap.gap)
        .Add(s.tokens_per_episode)
        .Add(s.success_rate)
        .Add(s.mean_team_reward)
        .Add(s.policy_objective)
        .Add(s.critic_loss)
        .Add(s.value_loss)
        .Add(s.entropy)
        .Add(s.first_ratio_deviation);
    AddStrategy(epochs, s.strategy);
  };
  artifacts.result = Train(config, options);
  rounds.Flush();
  epochs.Write(artifacts.run_dir / "epochs.csv");

  CsvTable summary({"config_hash", "run_id", "seed", "epochs",
                    "initial_value_gap", "final_value_gap",
                    "final_tokens_per_episode", "final_success_rate"});
  const auto& e = artifacts.result.epochs;
  summary.Row()
      .Add(hash)
      .Add(config.run_id)
      .Add(config.seed)
      .Add(config.training.epochs)
      .Add(e.empty() ? 0.0 : e.front().value_gap.gap)
      .Add(e.empty() ? 0.0 : e.back().value_gap.gap)
      .Add(e.empty() ? 0.0 : e.back().tokens_per_episode)
      .Add(e.empty() ? 0.0 : e.back().success_rate);
  summary.Write(artifacts.run_dir / "summary.csv");
  SaveCheckpoint(artifacts.run_dir / "checkpoint.json", config,
                 artifacts.result.models);
  return artifacts;
}

BudgetOverride ParseBudgetOverride(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("budget override \"" + std::string(text) +
                                "\" must be EPISODE:CAP");
  }
  BudgetOverride o;
  o.episode_budget = ParseTokens(text.substr(0, colon), text);
  o.hard_cap = ParseTokens(text.substr(colon + 1), text);
  return o;
}

EvalArtifacts RunEvalWorkflow(const Checkpoint& checkpoint,
                              const RunConfig& config,
                              const std::vector<BudgetOverride>& overrides,
                              const EvalOptions& options,
                              const std::filesystem::path& run_root) {
  CheckCompatible(checkpoint.config, config);
  std::vector<RunConfig> conditions;
  if (overrides.empty()) {
    conditions.push_back(config);
  } else {
    for (const BudgetOverride& o : overrides) {
      RunConfig c = config;
      c.budget.episode_budget = o.episode_budget;
      c.budget.hard_cap = o.hard_cap;
      ValidateRunConfig(c);
      conditions.push_back(std::move(c));
    }
  }

  EvalArtifacts artifacts;
  artifacts.eval_dir = RunDirectory(run_root, config.run_id) / "eval";
  std::filesystem::create_directories(artifacts.eval_dir);
  CsvTable table({"config_hash", "checkpoint_config_hash", "episode_budget",
                  "hard_cap", "episodes", "seed", "success_rate",
                  "mean_progress", "tokens_per_episode", "full", "summary",
                  "keywords", "silence", "submitted_full", "submitted_summary",
                  "submitted_keywords", "submitted_silence"});
  for (const RunConfig& c : conditions) {
    EvalSummary s = Evaluate(c, checkpoint.models, options);
    const std::string hash = ConfigHash(c);
    JsonlWriter rounds(artifacts.eval_dir /
                           ("rounds_" + std::to_string(c.budget.episode_budget) +
                            "_" + std::to_string(c.budget.hard_cap) + ".jsonl"),
                       hash);
    for (const RoundRecord& r : s.records) rounds.Write(r);
    table.Row()
        .Add(hash)
        .Add(ConfigHash(checkpoint.config))
        .Add(c.budget.episode_budget)
        .Add(c.budget.hard_cap)
        .Add(s.episodes)
        .Add(options.seed)
        .Add(s.success_rate)
        .Add(s.mean_progress)
        .Add(s.tokens.per_episode_mean);
    AddStrategy(table, s.broadcast);
    AddStrategy(table, s.submitted);
    artifacts.summaries.push_back(std::move(s));
  }
  table.Write(artifacts.eval_dir / "summary.csv");
  return artifacts;
}

}  // namespace dala
