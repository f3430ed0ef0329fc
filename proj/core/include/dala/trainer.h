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

#ifndef DALA_TRAINER_H_
#define DALA_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dala/config.h"
#include "dala/simulation.h"
#include "dala/telemetry.h"

namespace dala {

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IncompatibleCheckpoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Statistics of the rollouts collected at one epoch (before its update) and
// of the update that followed.
struct EpochStats {
  int epoch = 0;
  ValueGapPoint value_gap;
  double tokens_per_episode = 0.0;
  double success_rate = 0.0;
  double mean_team_reward = 0.0;  // summed over agents and rounds
  StrategyDistribution strategy;   // broadcast basis
  double policy_objective = 0.0;   // clipped surrogate at the first step
  double critic_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double first_ratio_deviation = 0.0;  // max |ratio - 1| at the first step
};

using EpochSink =
    std::function<void(const EpochStats&, std::span<const RoundRecord>)>;

struct TrainingOptions {
  int workers = 1;
  EpochSink sink;
};

struct TrainingResult {
  AgentModels initial;
  AgentModels models;
  std::vector<EpochStats> epochs;
};

TrainingResult Train(const RunConfig& config,
                     const TrainingOptions& options = {});

// Runs the episodes in order of spec; results are independent of workers.
std::vector<EpisodeResult> CollectEpisodes(const Team& team,
                                           const AgentModels& models,
                                           std::span<const EpisodeSpec> specs,
                                           int workers);

struct UpdateState;

// Owns the parameters and optimizer state across epochs.
class Learner {
 public:
  Learner(const Team& team, const AgentModels& models);
  ~Learner();
  Learner(Learner&&) noexcept;
  Learner& operator=(Learner&&) noexcept;

  // Full-batch updates on one epoch of episodes. Fills the loss fields of
  // stats; throws TrainingDiverged on a non-finite loss or parameter.
  void Update(std::span<const EpisodeResult> episodes, EpochStats& stats);
  const AgentModels& models() const { return models_; }

 private:
  const Team* team_;
  AgentModels models_;
  std::unique_ptr<UpdateState> state_;
};

struct EvalOptions {
  int episodes = 256;
  std::uint64_t seed = 1;
  int workers = 1;
};

struct EvalSummary {
  Tokens episode_budget = 0;
  Tokens hard_cap = 0;
  int episodes = 0;
  double success_rate = 0.0;
  double mean_progress = 0.0;
  TokenTotals tokens;
  StrategyDistribution broadcast;
  StrategyDistribution submitted;
  std::vector<RoundRecord> records;
};

// Frozen-policy evaluation. The config must be compatible with the one the
// models were trained under; only the budget may differ.
EvalSummary Evaluate(const RunConfig& config, const AgentModels& models,
                     const EvalOptions& options);

struct Checkpoint {
  RunConfig config;
  AgentModels models;
};

nlohmann::json CheckpointToJson(const RunConfig& config,
                                const AgentModels& models);
Checkpoint CheckpointFromJson(const nlohmann::json& document);
void SaveCheckpoint(const std::filesystem::path& path, const RunConfig& config,
                    const AgentModels& models);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

// Throws IncompatibleCheckpoint unless the two configs agree on everything
// but the budget and the training schedule.
void CheckCompatible(const RunConfig& trained, const RunConfig& evaluated);

}  // namespace dala

#endif  // DALA_TRAINER_H_
