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

#include "dala/simulation.h"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

namespace dala {

const std::vector<double>& AgentModels::PolicyOf(AgentId agent) const {
  return policies.at(SlotOf(agent));
}

const ValueNetParams& AgentModels::ValueNetOf(AgentId agent) const {
  return value_nets.at(value_nets.size() == 1 ? 0 : agent);
}

bool AgentModels::AllFinite() const {
  for (const auto& p : policies) {
    if (!dala::AllFinite(p)) return false;
  }
  for (const auto& v : value_nets) {
    if (!v.AllFinite()) return false;
  }
  return dala::AllFinite(critic);
}

Team::Team(const RunConfig& config)
    : config_(config),
      policy_(ObservationDim(config.env), NumActions(config.env)),
      value_net_(ValueNetShape{MessageDim(config.env),
                               ObservationDim(config.env)}),
      critic_({GlobalStateDim(config.env), 32, 32, 1}, false) {
  ValidateRunConfig(config);
}

std::size_t Team::num_slots() const {
  return config_.training.share_parameters
             ? 1
             : static_cast<std::size_t>(config_.env.num_agents);
}

AgentModels Team::Init(std::uint64_t seed) const {
  Rng rng(seed);
  AgentModels models;
  for (std::size_t k = 0; k < num_slots(); ++k) {
    models.policies.push_back(policy_.Init(rng));
  }
  for (std::size_t k = 0; k < num_slots(); ++k) {
    models.value_nets.push_back(value_net_.Init(rng));
  }
  if (config_.training.centralized_critic) {
    models.critic = critic_.InitParams(rng, 1.0);
  }
  return models;
}

void Team::Check(const AgentModels& models) const {
  if (models.policies.size() != num_slots() ||
      models.value_nets.size() != num_slots()) {
    throw std::invalid_argument("model count does not match the team");
  }
  for (const auto& p : models.policies) {
    if (p.size() != policy_.num_params()) {
      throw std::invalid_argument("policy parameters do not match shape");
    }
  }
  for (const auto& v : models.value_nets) {
    if (v.message_encoder_weights.size() + v.observation_encoder_weights.size() +
            v.fusion_and_head_weights.size() !=
        value_net_.Zeros().size()) {
      throw std::invalid_argument("value network parameters do not match shape");
    }
  }
  const std::size_t critic_size =
      config_.training.centralized_critic ? critic_.num_params() : 0;
  if (models.critic.size() != critic_size) {
    throw std::invalid_argument("critic parameters do not match shape");
  }
}

double Team::StateValue(const AgentModels& models, AgentId agent,
                        std::span<const double> observation,
                        std::span<const double> global_state) const {
  if (config_.training.centralized_critic) {
    return critic_.Forward(models.critic, global_state)[0];
  }
  return value_net_.PredictState(models.ValueNetOf(agent), observation);
}

MarketClearing ClearMarket(
    const EnvState& state, Tokens cap,
    const std::vector<std::optional<CandidateMessage>>& proposals,
    const ValueFn& value_of, const RunConfig& config) {
  const TaskInstance& instance = *state.instance;
  const auto n = static_cast<std::size_t>(instance.num_agents);
  if (proposals.size() != n) {
    throw std::invalid_argument("expected one proposal slot per agent");
  }

  // The pool is every candidate of every agent this round, proposed or not.
  struct PoolEntry {
    AgentId owner;
    CandidateMessage message;
  };
  std::vector<PoolEntry> pool;
  std::vector<double> values;
  std::vector<bool> had_candidates(n, false);
  for (AgentId a = 0; a < n; ++a) {
    for (CandidateMessage& m : CandidateMessages(state, a, config.env)) {
      had_candidates[a] = true;
      values.push_back(value_of(a, m));
      pool.push_back({a, std::move(m)});
    }
  }
  DensityOptions options = config.valuation.density;
  options.divide_by_length =
      options.divide_by_length && config.ablation.value_density;
  std::vector<DensityReport> reports;
  std::vector<double> positives;
  for (std::size_t k = 0; k < pool.size(); ++k) {
    reports.push_back(
        ValueDensity(values, k, pool[k].message.token_len, options));
    if (reports.back().density > 0.0) positives.push_back(reports.back().density);
  }

  MarketClearing clearing;
  std::vector<Bid> bids;
  std::vector<CandidateMessage> submitted(n);
  for (AgentId a = 0; a < n; ++a) {
    AgentDecision decision;
    decision.agent_id = a;
    decision.had_candidates = had_candidates[a];
    if (proposals[a]) {
      const CandidateMessage& proposal = *proposals[a];
      std::size_t index = pool.size();
      for (std::size_t k = 0; k < pool.size(); ++k) {
        if (pool[k].owner == a &&
            pool[k].message.shard_ids == proposal.shard_ids) {
          index = k;
          break;
        }
      }
      if (index == pool.size()) {
        throw std::invalid_argument("agent " + std::to_string(a) +
                                    " proposed a message it cannot send");
      }
      const DensityReport& report = reports[index];
      decision.proposed = true;
      decision.shard_ids = proposal.shard_ids;
      decision.critical = ContainsCritical(instance, proposal);
      decision.density = report;
      Tier tier;
      if (config.ablation.tiered_content) {
        tier = AssignTier(report.density, positives, config.valuation.thresholds);
      } else {
        tier = report.density > 0.0 ? Tier::kFull : Tier::kSilence;
      }
      CandidateMessage message = DowngradeToFit(
          RenderAtTier(pool[index].message, tier, config.env.tier_lengths), cap,
          config.env.tier_lengths);
      decision.tier = message.tier;
      if (message.tier != Tier::kSilence) {
        decision.bid = ComputeBid(report.density);
        decision.message_len = message.token_len;
        bids.push_back(Bid{a, decision.bid, message.token_len, a});
      }
      submitted[a] = std::move(message);
    }
    clearing.decisions.push_back(std::move(decision));
  }

  clearing.outcome =
      RunAuction(bids, cap, WdpOptions{config.valuation.tie_epsilon});
  for (AgentId winner : clearing.outcome.winners) {
    AgentDecision& decision = clearing.decisions[winner];
    decision.won = true;
    decision.payment = clearing.outcome.PaymentOf(winner);
    clearing.broadcast.push_back(submitted[winner]);
  }
  return clearing;
}

std::size_t SampleCategorical(std::span<const double> probs, Rng& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double cumulative = 0.0;
  std::size_t last = probs.size();
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    cumulative += probs[k];
    last = k;
    if (u < cumulative) return k;
  }
  if (last == probs.size()) {
    throw std::invalid_argument("categorical distribution has no support");
  }
  return last;
}

EpisodeResult RunEpisode(const Team& team, const AgentModels& models,
                         const EpisodeSpec& spec) {
  return RunEpisode(
      team, models,
      std::make_shared<const TaskInstance>(
          GenerateInstance(team.config().env, spec.instance_seed)),
      spec);
}

EpisodeResult RunEpisode(const Team& team, const AgentModels& models,
                         std::shared_ptr<const TaskInstance> instance,
                         const EpisodeSpec& spec) {
  const RunConfig& config = team.config();
  const EnvConfig& env = config.env;
  const TrainingConfig& training = config.training;
  team.Check(models);
  const auto n = static_cast<std::size_t>(instance->num_agents);
  if (instance->num_agents != env.num_agents) {
    throw std::invalid_argument("instance does not match the configured team");
  }

  EpisodeResult result;
  result.budget =
      BudgetState::Create(config.budget.episode_budget, env.horizon,
                          config.budget.hard_cap, config.ablation.dynamic_budget);
  result.trajectories.resize(n);
  EnvState state = InitialState(instance);
  result.initial_progress = state.progress;
  Rng rng(spec.action_seed);

  for (int round = 1; round <= env.horizon && !IsSolved(state); ++round) {
    const double warning = BudgetWarningLevel(result.budget);
    const Tokens cap = EffectiveCap(result.budget);
    const std::vector<double> global = GlobalState(state, warning, env);

    std::vector<std::vector<double>> observations(n);
    std::vector<std::vector<bool>> masks(n);
    std::vector<std::size_t> actions(n);
    std::vector<double> log_probs(n);
    std::vector<std::optional<CandidateMessage>> proposals(n);
    for (AgentId a = 0; a < n; ++a) {
      observations[a] = Observe(state, a, warning, env).Flatten();
      masks[a] = ActionMask(state, a, env);
      const std::vector<double> probs = team.policy().Probabilities(
          models.PolicyOf(a), observations[a], masks[a]);
      actions[a] = SampleCategorical(probs, rng);
      log_probs[a] = std::log(probs[actions[a]]);
      proposals[a] = SlotMessage(state, a, actions[a], env);
    }

    const ValueFn value_of = [&](AgentId a, const CandidateMessage& m) {
      if (!config.ablation.value_learning) {
        return static_cast<double>(m.token_len);
      }
      return team.value_net().Predict(models.ValueNetOf(a),
                                      MessageFeatures(*instance, m, env),
                                      observations[a]);
    };
    MarketClearing clearing =
        ClearMarket(state, cap, proposals, value_of, config);

    StepResult step = Step(state, clearing.broadcast, env);
    result.budget = Charge(result.budget, clearing.outcome.total_cost);
    state = std::move(step.state);

    const double task_reward = training.per_agent_task_reward
                                   ? step.task_delta
                                   : step.task_delta / static_cast<double>(n);
    for (AgentId a = 0; a < n; ++a) {
      const AgentDecision& decision = clearing.decisions[a];
      Transition t;
      t.observation = observations[a];
      t.global_state = global;
      t.action_mask = masks[a];
      t.action_index = actions[a];
      t.log_prob_old = log_probs[a];
      t.payment = decision.payment;
      t.is_winner = decision.won;
      t.task_delta = step.task_delta;
      t.reward = Reward(task_reward, t.payment, t.is_winner, training.alpha,
                        training.beta);
      t.value_estimate =
          team.StateValue(models, a, observations[a], global);
      if (proposals[a] && config.ablation.value_learning) {
        result.value_samples.push_back(
            ValueSample{a, result.trajectories[a].size(),
                        MessageFeatures(*instance, *proposals[a], env),
                        observations[a], decision.critical});
      }
      result.trajectories[a].push_back(std::move(t));
    }

    RoundRecord record;
    record.epoch = spec.epoch;
    record.episode_id = spec.episode_id;
    record.round = round;
    record.agents = std::move(clearing.decisions);
    record.effective_cap = cap;
    record.total_cost = clearing.outcome.total_cost;
    record.task_delta = step.task_delta;
    record.progress = state.progress;
    result.rounds.push_back(std::move(record));
  }
  for (auto& trajectory : result.trajectories) {
    if (!trajectory.empty()) trajectory.back().done = true;
  }
  result.final_progress = state.progress;
  result.solved = IsSolved(state);
  return result;
}

}  // namespace dala
