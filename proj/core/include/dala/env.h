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

#ifndef DALA_ENV_H_
#define DALA_ENV_H_

// Synthetic distributed-information task. Shards of information are spread
// over the agents; a subset is critical, and the team makes progress only as
// critical shards are broadcast. No agent holds enough to finish alone.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dala/types.h"

namespace dala {

struct EnvConfig {
  int num_agents = 4;
  int num_shards = 8;
  double critical_ratio = 0.5;
  int required_critical_count = 4;
  int horizon = 4;
  int feature_dim = 4;
  // Added to every feature of a critical shard.
  double critical_offset = 1.5;
  int max_subset_size = 1;
  TierLengths tier_lengths;
  // Progress credit for a critical shard revealed only as keywords.
  double keywords_credit = 1.0;
  // Std of the noise receivers see on Summary-revealed shard features.
  double summary_noise = 0.1;

  // Throws std::invalid_argument describing the first inconsistency.
  void Validate() const;
  int NumCritical() const;
  // Largest number of shards any agent holds.
  int MaxShardsPerAgent() const;
};

struct Shard {
  ShardId shard_id = 0;
  AgentId holder = 0;
  bool critical = false;
  std::vector<double> feature_vector;
};

struct TaskInstance {
  std::vector<Shard> shards;  // indexed by shard_id
  int num_agents = 0;
  int required_critical_count = 1;
  int horizon = 1;
  std::uint64_t seed = 0;

  // Ascending shard ids held by `agent`.
  std::vector<ShardId> ShardsOf(AgentId agent) const;
  int CriticalCount() const;
  // True when the critical shards held by everyone except `agent` still
  // cover required_critical_count.
  bool SolvableWithout(AgentId agent) const;
};

void to_json(nlohmann::json& j, const TaskInstance& instance);
void from_json(const nlohmann::json& j, TaskInstance& instance);

// Deterministic in (config, seed). Holders are dealt round-robin and then
// shuffled; critical flags go to a random subset of NumCritical() shards.
// Throws std::invalid_argument when the config is inconsistent or the
// instance could not be solved even with unlimited budget.
TaskInstance GenerateInstance(const EnvConfig& config, std::uint64_t seed);

struct EnvState {
  std::shared_ptr<const TaskInstance> instance;
  std::map<ShardId, Tier> revealed;  // shard -> tier it was broadcast at
  // What receivers know about each shard's features, row per shard.
  std::vector<std::vector<double>> public_features;
  int round = 0;  // completed rounds
  double credited_critical = 0.0;
  double progress = 0.0;

  bool IsRevealed(ShardId shard) const { return revealed.contains(shard); }
};

EnvState InitialState(std::shared_ptr<const TaskInstance> instance);

// Unrevealed subsets of the agent's own shards, up to max_subset_size, by
// size and then lexicographically, all rendered at Full.
std::vector<CandidateMessage> CandidateMessages(const EnvState& state,
                                                AgentId agent,
                                                const EnvConfig& config);

struct StepResult {
  EnvState state;
  double task_delta = 0.0;
};

// Reveals the shards of every non-silent winning message and advances the
// round. Progress is the credited fraction of required critical shards.
StepResult Step(const EnvState& state,
                const std::vector<CandidateMessage>& winning_messages,
                const EnvConfig& config);

bool IsSolved(const EnvState& state);

// Policy action space. Slot 0 proposes nothing; every other slot is a fixed
// subset of the agent's own shard positions (k-th lowest shard id).
std::vector<std::vector<int>> ActionSlots(const EnvConfig& config);
std::size_t NumActions(const EnvConfig& config);
std::vector<bool> ActionMask(const EnvState& state, AgentId agent,
                             const EnvConfig& config);
// The Full-tier message behind `slot`, or nullopt for slot 0 and for slots
// that reference missing or already revealed shards.
std::optional<CandidateMessage> SlotMessage(const EnvState& state,
                                            AgentId agent, std::size_t slot,
                                            const EnvConfig& config);

struct Observation {
  std::vector<double> own_shard_features;  // per position: features, held, revealed
  std::vector<double> revealed_summary;    // flags, mean public features, progress
  double budget_warning = 1.0;
  double round_fraction = 0.0;

  std::vector<double> Flatten() const;
};

Observation Observe(const EnvState& state, AgentId agent,
                    double budget_warning, const EnvConfig& config);
std::size_t ObservationDim(const EnvConfig& config);

// Full state for the centralized critic.
std::vector<double> GlobalState(const EnvState& state, double budget_warning,
                                const EnvConfig& config);
std::size_t GlobalStateDim(const EnvConfig& config);

// Mean shard features plus the relative shard count.
std::vector<double> MessageFeatures(const TaskInstance& instance,
                                    const CandidateMessage& message,
                                    const EnvConfig& config);
std::size_t MessageDim(const EnvConfig& config);

bool ContainsCritical(const TaskInstance& instance,
                      const CandidateMessage& message);

}  // namespace dala

#endif  // DALA_ENV_H_
