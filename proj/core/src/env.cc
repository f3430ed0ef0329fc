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

#include "dala/env.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "dala/rng.h"

namespace dala {
namespace {

void Require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

// Non-empty subsets of {0..n-1} with at most k elements, by size then lex.
std::vector<std::vector<int>> Subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  for (int size = 1; size <= std::min(n, k); ++size) {
    auto recurse = [&](auto&& self, int start) -> void {
      if (static_cast<int>(current.size()) == size) {
        out.push_back(current);
        return;
      }
      for (int i = start; i < n; ++i) {
        current.push_back(i);
        self(self, i + 1);
        current.pop_back();
      }
    };
    recurse(recurse, 0);
  }
  return out;
}

void CheckAgent(const TaskInstance& instance, AgentId agent) {
  if (agent >= static_cast<AgentId>(instance.num_agents)) {
    throw std::invalid_argument("unknown agent " + std::to_string(agent));
  }
}

}  // namespace

void EnvConfig::Validate() const {
  Require(num_agents >= 1, "num_agents must be >= 1");
  Require(num_shards >= num_agents, "num_shards must be >= num_agents");
  Require(critical_ratio >= 0.0 && critical_ratio <= 1.0,
          "critical_ratio must lie in [0, 1]");
  Require(required_critical_count >= 1, "required_critical_count must be >= 1");
  Require(required_critical_count <= NumCritical(),
          "required_critical_count (" + std::to_string(required_critical_count) +
              ") exceeds the number of critical shards (" +
              std::to_string(NumCritical()) + ")");
  Require(horizon >= 1, "horizon must be >= 1");
  Require(feature_dim >= 1, "feature_dim must be >= 1");
  Require(max_subset_size >= 1, "max_subset_size must be >= 1");
  Require(keywords_credit >= 0.0 && keywords_credit <= 1.0,
          "keywords_credit must lie in [0, 1]");
  Require(summary_noise >= 0.0, "summary_noise must be >= 0");
  tier_lengths.Validate();
}

int EnvConfig::NumCritical() const {
  return static_cast<int>(std::lround(critical_ratio * num_shards));
}

int EnvConfig::MaxShardsPerAgent() const {
  return (num_shards + num_agents - 1) / num_agents;
}

std::vector<ShardId> TaskInstance::ShardsOf(AgentId agent) const {
  std::vector<ShardId> out;
  for (const Shard& shard : shards) {
    if (shard.holder == agent) out.push_back(shard.shard_id);
  }
  return out;
}

int TaskInstance::CriticalCount() const {
  return static_cast<int>(std::count_if(
      shards.begin(), shards.end(), [](const Shard& s) { return s.critical; }));
}

bool TaskInstance::SolvableWithout(AgentId agent) const {
  int supply = 0;
  for (const Shard& shard : shards) {
    if (shard.critical && shard.holder != agent) ++supply;
  }
  return supply >= required_critical_count;
}

void to_json(nlohmann::json& j, const TaskInstance& instance) {
  nlohmann::json shards = nlohmann::json::array();
  for (const Shard& s : instance.shards) {
    shards.push_back({{"shard_id", s.shard_id},
                      {"holder", s.holder},
                      {"critical", s.critical},
                      {"feature_vector", s.feature_vector}});
  }
  j = {{"seed", instance.seed},
       {"num_agents", instance.num_agents},
       {"required_critical_count", instance.required_critical_count},
       {"horizon", instance.horizon},
       {"shards", std::move(shards)}};
}

void from_json(const nlohmann::json& j, TaskInstance& instance) {
  instance.seed = j.at("seed").get<std::uint64_t>();
  instance.num_agents = j.at("num_agents").get<int>();
  instance.required_critical_count = j.at("required_critical_count").get<int>();
  instance.horizon = j.at("horizon").get<int>();
  instance.shards.clear();
  for (const auto& s : j.at("shards")) {
    Shard shard;
    shard.shard_id = s.at("shard_id").get<ShardId>();
    shard.holder = s.at("holder").get<AgentId>();
    shard.critical = s.at("critical").get<bool>();
    shard.feature_vector = s.at("feature_vector").get<std::vector<double>>();
    instance.shards.push_back(std::move(shard));
  }
  for (std::size_t k = 0; k < instance.shards.size(); ++k) {
    Require(instance.shards[k].shard_id == k, "shard ids must be 0..n-1 in order");
  }
}

TaskInstance GenerateInstance(const EnvConfig& config, std::uint64_t seed) {
  config.Validate();
  Rng rng(seed);

  std::vector<AgentId> holders(config.num_shards);
  for (int k = 0; k < config.num_shards; ++k) {
    holders[k] = static_cast<AgentId>(k % config.num_agents);
  }
  std::shuffle(holders.begin(), holders.end(), rng);

  std::vector<int> order(config.num_shards);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> critical(config.num_shards, false);
  for (int k = 0; k < config.NumCritical(); ++k) critical[order[k]] = true;

  TaskInstance instance;
  instance.num_agents = config.num_agents;
  instance.required_critical_count = config.required_critical_count;
  instance.horizon = config.horizon;
  instance.seed = seed;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < config.num_shards; ++k) {
    Shard shard;
    shard.shard_id = static_cast<ShardId>(k);
    shard.holder = holders[k];
    shard.critical = critical[k];
    shard.feature_vector.resize(config.feature_dim);
    for (double& f : shard.feature_vector) {
      f = normal(rng) + (shard.critical ? config.critical_offset : 0.0);
    }
    instance.shards.push_back(std::move(shard));
  }

  // With unlimited budget every agent can broadcast max_subset_size shards
  // per round at full fidelity.
  int reachable = 0;
  for (int a = 0; a < config.num_agents; ++a) {
    int held = 0;
    for (const Shard& s : instance.shards) {
      if (s.critical && s.holder == static_cast<AgentId>(a)) ++held;
    }
    reachable += std::min(held, config.horizon * config.max_subset_size);
  }
  Require(reachable >= config.required_critical_count,
          "generated instance is not solvable within the horizon");
  return instance;
}

EnvState InitialState(std::shared_ptr<const TaskInstance> instance) {
  EnvState state;
  const std::size_t dim = instance->shards.empty()
                              ? 0
                              : instance->shards.front().feature_vector.size();
  state.public_features.assign(instance->shards.size(),
                               std::vector<double>(dim, 0.0));
  state.instance = std::move(instance);
  return state;
}

std::vector<CandidateMessage> CandidateMessages(const EnvState& state,
                                                AgentId agent,
                                                const EnvConfig& config) {
  CheckAgent(*state.instance, agent);
  std::vector<CandidateMessage> out;
  for (std::size_t slot = 1; slot < NumActions(config); ++slot) {
    if (auto message = SlotMessage(state, agent, slot, config)) {
      out.push_back(std::move(*message));
    }
  }
  return out;
}

StepResult Step(const EnvState& state,
                const std::vector<CandidateMessage>& winning_messages,
                const EnvConfig& config) {
  StepResult result{state, 0.0};
  EnvState& next = result.state;
  const TaskInstance& instance = *state.instance;
  for (const CandidateMessage& message : winning_messages) {
    if (message.tier == Tier::kSilence) continue;
    for (ShardId id : message.shard_ids) {
      if (id >= instance.shards.size()) {
        throw std::invalid_argument("message references unknown shard " +
                                    std::to_string(id));
      }
      if (next.IsRevealed(id)) continue;
      next.revealed.emplace(id, message.tier);
      const Shard& shard = instance.shards[id];
      std::vector<double>& seen = next.public_features[id];
      switch (message.tier) {
        case Tier::kFull:
          seen = shard.feature_vector;
          break;
        case Tier::kSummary: {
          Rng noise_rng(DeriveSeed(instance.seed, {id, 0x5u}));
          std::normal_distribution<double> noise(0.0, 1.0);
          for (std::size_t f = 0; f < seen.size(); ++f) {
            seen[f] = shard.feature_vector[f] + config.summary_noise * noise(noise_rng);
          }
          break;
        }
        default:
          std::fill(seen.begin(), seen.end(), 0.0);
          break;
      }
      if (shard.critical) {
        next.credited_critical +=
            message.tier == Tier::kKeywords ? config.keywords_credit : 1.0;
      }
    }
  }
  next.round = state.round + 1;
  next.progress = std::min(
      1.0, next.credited_critical /
               static_cast<double>(instance.required_critical_count));
  result.task_delta = next.progress - state.progress;
  return result;
}

bool IsSolved(const EnvState& state) { return state.progress >= 1.0; }

std::vector<std::vector<int>> ActionSlots(const EnvConfig& config) {
  std::vector<std::vector<int>> slots{{}};
  for (auto& subset :
       Subsets(config.MaxShardsPerAgent(), config.max_subset_size)) {
    slots.push_back(std::move(subset));
  }
  return slots;
}

std::size_t NumActions(const EnvConfig& config) {
  return ActionSlots(config).size();
}

std::vector<bool> ActionMask(const EnvState& state, AgentId agent,
                             const EnvConfig& config) {
  const std::size_t n = NumActions(config);
  std::vector<bool> mask(n, false);
  mask[0] = true;
  for (std::size_t slot = 1; slot < n; ++slot) {
    mask[slot] = SlotMessage(state, agent, slot, config).has_value();
  }
  return mask;
}

std::optional<CandidateMessage> SlotMessage(const EnvState& state,
                                            AgentId agent, std::size_t slot,
                                            const EnvConfig& config) {
  CheckAgent(*state.instance, agent);
  const auto slots = ActionSlots(config);
  if (slot == 0 || slot >= slots.size()) return std::nullopt;
  const std::vector<ShardId> own = state.instance->ShardsOf(agent);
  std::vector<ShardId> ids;
  for (int position : slots[slot]) {
    if (position >= static_cast<int>(own.size())) return std::nullopt;
    if (state.IsRevealed(own[position])) return std::nullopt;
    ids.push_back(own[position]);
  }
  return MakeMessage(std::move(ids), Tier::kFull, config.tier_lengths);
}

std::vector<double> Observation::Flatten() const {
  std::vector<double> flat = own_shard_features;
  flat.insert(flat.end(), revealed_summary.begin(), revealed_summary.end());
  flat.push_back(budget_warning);
  flat.push_back(round_fraction);
  return flat;
}

Observation Observe(const EnvState& state, AgentId agent,
                    double budget_warning, const EnvConfig& config) {
  const TaskInstance& instance = *state.instance;
  CheckAgent(instance, agent);
  const auto dim = static_cast<std::size_t>(config.feature_dim);
  Observation obs;
  const std::vector<ShardId> own = instance.ShardsOf(agent);
  for (int p = 0; p < config.MaxShardsPerAgent(); ++p) {
    if (p < static_cast<int>(own.size())) {
      const Shard& shard = instance.shards[own[p]];
      obs.own_shard_features.insert(obs.own_shard_features.end(),
                                    shard.feature_vector.begin(),
                                    shard.feature_vector.end());
      obs.own_shard_features.push_back(1.0);
      obs.own_shard_features.push_back(state.IsRevealed(own[p]) ? 1.0 : 0.0);
    } else {
      obs.own_shard_features.insert(obs.own_shard_features.end(), dim + 2, 0.0);
    }
  }
  std::vector<double> mean_public(dim, 0.0);
  for (const Shard& shard : instance.shards) {
    obs.revealed_summary.push_back(state.IsRevealed(shard.shard_id) ? 1.0 : 0.0);
  }
  if (!state.revealed.empty()) {
    for (const auto& [id, tier] : state.revealed) {
      for (std::size_t f = 0; f < dim; ++f) {
        mean_public[f] += state.public_features[id][f];
      }
    }
    for (double& f : mean_public) f /= static_cast<double>(state.revealed.size());
  }
  obs.revealed_summary.insert(obs.revealed_summary.end(), mean_public.begin(),
                              mean_public.end());
  obs.revealed_summary.push_back(state.progress);
  obs.budget_warning = budget_warning;
  obs.round_fraction =
      static_cast<double>(state.round) / static_cast<double>(instance.horizon);
  return obs;
}

std::size_t ObservationDim(const EnvConfig& config) {
  const auto dim = static_cast<std::size_t>(config.feature_dim);
  return static_cast<std::size_t>(config.MaxShardsPerAgent()) * (dim + 2) +
         static_cast<std::size_t>(config.num_shards) + dim + 1 + 2;
}

std::vector<double> GlobalState(const EnvState& state, double budget_warning,
                                const EnvConfig& config) {
  std::vector<double> global;
  global.reserve(GlobalStateDim(config));
  for (const Shard& shard : state.instance->shards) {
    const bool revealed = state.IsRevealed(shard.shard_id);
    global.push_back(revealed ? 1.0 : 0.0);
    global.push_back(shard.critical && !revealed ? 1.0 : 0.0);
  }
  global.push_back(state.progress);
  global.push_back(budget_warning);
  global.push_back(static_cast<double>(state.round) /
                   static_cast<double>(state.instance->horizon));
  return global;
}

std::size_t GlobalStateDim(const EnvConfig& config) {
  return 2 * static_cast<std::size_t>(config.num_shards) + 3;
}

std::vector<double> MessageFeatures(const TaskInstance& instance,
                                    const CandidateMessage& message,
                                    const EnvConfig& config) {
  const auto dim = static_cast<std::size_t>(config.feature_dim);
  std::vector<double> features(dim + 1, 0.0);
  if (message.shard_ids.empty()) return features;
  for (ShardId id : message.shard_ids) {
    for (std::size_t f = 0; f < dim; ++f) {
      features[f] += instance.shards.at(id).feature_vector[f];
    }
  }
  const auto count = static_cast<double>(message.shard_ids.size());
  for (std::size_t f = 0; f < dim; ++f) features[f] /= count;
  features[dim] = count / static_cast<double>(config.max_subset_size);
  return features;
}

std::size_t MessageDim(const EnvConfig& config) {
  return static_cast<std::size_t>(config.feature_dim) + 1;
}

bool ContainsCritical(const TaskInstance& instance,
                      const CandidateMessage& message) {
  return std::any_of(message.shard_ids.begin(), message.shard_ids.end(),
                     [&](ShardId id) { return instance.shards.at(id).critical; });
}

}  // namespace dala
