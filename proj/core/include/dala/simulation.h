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

#ifndef DALA_SIMULATION_H_
#define DALA_SIMULATION_H_

// One market round and one full episode: policies pick a candidate message,
// the value network prices it, the auction clears under the round cap and the
// environment reveals the winning shards.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dala/budget.h"
#include "dala/config.h"
#include "dala/env.h"
#include "dala/market.h"
#include "dala/marl.h"
#include "dala/nn.h"
#include "dala/telemetry.h"
#include "dala/valuation.h"

namespace dala {

// Parameters for the whole team. With shared parameters the policy and value
// net vectors hold a single entry used by every agent.
struct AgentModels {
  std::vector<std::vector<double>> policies;
  std::vector<ValueNetParams> value_nets;
  std::vector<double> critic;  // empty without a centralized critic

  const std::vector<double>& PolicyOf(AgentId agent) const;
  const ValueNetParams& ValueNetOf(AgentId agent) const;
  std::size_t SlotOf(AgentId agent) const {
    return policies.size() == 1 ? 0 : agent;
  }
  bool AllFinite() const;

  friend bool operator==(const AgentModels&, const AgentModels&) = default;
};

// Network shapes derived from a run config.
class Team {
 public:
  explicit Team(const RunConfig& config);

  const RunConfig& config() const { return config_; }
  const PolicyNet& policy() const { return policy_; }
  const ValueNet& value_net() const { return value_net_; }
  const Mlp& critic() const { return critic_; }
  std::size_t num_slots() const;

  AgentModels Init(std::uint64_t seed) const;
  void Check(const AgentModels& models) const;

  // V(o) for the advantage baseline.
  double StateValue(const AgentModels& models, AgentId agent,
                    std::span<const double> observation,
                    std::span<const double> global_state) const;

 private:
  RunConfig config_;
  PolicyNet policy_;
  ValueNet value_net_;
  Mlp critic_;
};

// Raw value of one candidate message held by an agent.
using ValueFn = std::function<double(AgentId, const CandidateMessage&)>;

struct MarketClearing {
  std::vector<AgentDecision> decisions;  // one per agent, ascending id
  AuctionOutcome outcome;
  std::vector<CandidateMessage> broadcast;  // winning messages, by agent id
};

// Prices every agent's candidate pool, turns the proposals into bids and runs
// the auction. proposals[i] is agent i's chosen message at full tier, or
// nullopt for no proposal.
MarketClearing ClearMarket(
    const EnvState& state, Tokens cap,
    const std::vector<std::optional<CandidateMessage>>& proposals,
    const ValueFn& value_of, const RunConfig& config);

struct ValueSample {
  AgentId agent = 0;
  std::size_t step = 0;  // index into the agent's trajectory
  std::vector<double> message;
  std::vector<double> observation;
  bool critical = false;
};

struct EpisodeSpec {
  std::uint64_t instance_seed = 0;
  std::uint64_t action_seed = 0;
  int epoch = 0;
  std::uint64_t episode_id = 0;
};

struct EpisodeResult {
  std::vector<RoundRecord> rounds;
  std::vector<std::vector<Transition>> trajectories;  // per agent, per round
  std::vector<ValueSample> value_samples;
  BudgetState budget;
  double initial_progress = 0.0;
  double final_progress = 0.0;
  bool solved = false;
};

// Rounds continue until the task is solved or the horizon is reached.
EpisodeResult RunEpisode(const Team& team, const AgentModels& models,
                         const EpisodeSpec& spec);

// Same, on a given instance.
EpisodeResult RunEpisode(const Team& team, const AgentModels& models,
                         std::shared_ptr<const TaskInstance> instance,
                         const EpisodeSpec& spec);

// Index drawn from a categorical distribution with one uniform variate.
std::size_t SampleCategorical(std::span<const double> probs, Rng& rng);

}  // namespace dala

#endif  // DALA_SIMULATION_H_
