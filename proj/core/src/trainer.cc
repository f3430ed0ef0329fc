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

#include "dala/trainer.h"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>
#include <utility>

#include <nlohmann/json.hpp>

namespace dala {
namespace {

constexpr const char* kCheckpointFormat = "dala-checkpoint-1";

EpochStats RolloutStats(int epoch, std::span<const EpisodeResult> episodes) {
  EpochStats stats;
  stats.epoch = epoch;
  std::vector<RoundRecord> records;
  double solved = 0.0;
  double team_reward = 0.0;
  for (const EpisodeResult& e : episodes) {
    records.insert(records.end(), e.rounds.begin(), e.rounds.end());
    if (e.solved) solved += 1.0;
    for (const auto& trajectory : e.trajectories) {
      for (const Transition& t : trajectory) team_reward += t.reward;
    }
  }
  const auto n = static_cast<double>(episodes.size());
  if (episodes.empty()) return stats;
  const std::vector<ValueGapPoint> curve = ValueGapCurve(records);
  if (!curve.empty()) stats.value_gap = curve.front();
  stats.value_gap.epoch = epoch;
  stats.tokens_per_episode =
      static_cast<double>(TokenAccounting(records).tokens_spent) / n;
  stats.success_rate = solved / n;
  stats.mean_team_reward = team_reward / n;
  stats.strategy = ComputeStrategyDistribution(records);
  return stats;
}

}  // namespace

struct UpdateState {
  std::vector<MomentumAscent> policy_optimizers;
  std::vector<MomentumAscent> value_optimizers;
  MomentumAscent critic_optimizer;
};

Learner::Learner(const Team& team, const AgentModels& models)
    : team_(&team), models_(models), state_(std::make_unique<UpdateState>()) {
  team.Check(models);
  const TrainingConfig& t = team.config().training;
  for (const auto& p : models_.policies) {
    state_->policy_optimizers.emplace_back(p.size(), t.lr, t.momentum,
                                           t.grad_clip);
  }
  for (const auto& v : models_.value_nets) {
    state_->value_optimizers.emplace_back(v.size(), t.lr, t.momentum,
                                          t.grad_clip);
  }
  state_->critic_optimizer =
      MomentumAscent(models_.critic.size(), t.lr, t.momentum, t.grad_clip);
}

Learner::~Learner() = default;
Learner::Learner(Learner&&) noexcept = default;
Learner& Learner::operator=(Learner&&) noexcept = default;

void Learner::Update(std::span<const EpisodeResult> episodes,
                     EpochStats& stats) {
  const RunConfig& config = team_->config();
  const TrainingConfig& tc = config.training;
  const PolicyNet& policy = team_->policy();
  const ValueNet& value_net = team_->value_net();
  const Mlp& critic = team_->critic();
  const std::size_t slots = models_.policies.size();

  struct Sample {
    const Transition* transition;
    AgentId agent;
    double advantage;
    double target;
  };
  struct ValueTarget {
    const ValueSample* sample;
    double target;
  };
  std::vector<Sample> samples;
  std::vector<ValueTarget> value_targets;
  for (const EpisodeResult& episode : episodes) {
    for (AgentId a = 0; a < episode.trajectories.size(); ++a) {
      const auto& trajectory = episode.trajectories[a];
      if (trajectory.empty()) continue;
      const Advantages adv =
          ComputeAdvantages(trajectory, tc.gamma, tc.lambda);
      for (std::size_t s = 0; s < trajectory.size(); ++s) {
        samples.push_back({&trajectory[s], a, adv.advantages[s], adv.returns[s]});
      }
      for (const ValueSample& v : episode.value_samples) {
        if (v.agent == a) value_targets.push_back({&v, adv.returns.at(v.step)});
      }
    }
  }
  if (samples.empty()) return;
  {
    std::vector<double> normalized;
    for (const Sample& s : samples) normalized.push_back(s.advantage);
    NormalizeAdvantages(normalized);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      samples[k].advantage = normalized[k];
    }
  }
  std::vector<double> policy_count(slots, 0.0), value_count(slots, 0.0);
  for (const Sample& s : samples) policy_count[models_.SlotOf(s.agent)] += 1.0;
  for (const ValueTarget& v : value_targets) {
    value_count[models_.SlotOf(v.sample->agent)] += 1.0;
  }
  const auto total = static_cast<double>(samples.size());

  for (int iter = 0; iter < tc.update_iters; ++iter) {
    const bool first = iter == 0;
    std::vector<std::vector<double>> policy_grads;
    for (const auto& p : models_.policies) {
      policy_grads.emplace_back(p.size(), 0.0);
    }
    std::vector<ValueNetParams> value_grads(slots, value_net.Zeros());
    std::vector<double> critic_grad(models_.critic.size(), 0.0);
    double objective = 0.0, entropy = 0.0, critic_loss = 0.0, value_loss = 0.0;
    double deviation = 0.0;

    for (const Sample& s : samples) {
      const Transition& t = *s.transition;
      const std::size_t slot = models_.SlotOf(s.agent);
      const std::vector<double>& params = models_.policies[slot];
      const std::vector<double> probs =
          policy.Probabilities(params, t.observation, t.action_mask);
      const double log_prob = std::log(probs[t.action_index]);
      const double ratio = PolicyRatio(log_prob, t.log_prob_old);
      const double exponent = log_prob - t.log_prob_old;
      if (first) {
        deviation = std::max(deviation, std::abs(ratio - 1.0));
        objective += ClippedPolicyLoss(ratio, s.advantage, tc.epsilon) / total;
        entropy += Entropy(probs) / total;
      }
      const bool clamped = std::abs(exponent) > kMaxLogRatio;
      const double weight =
          clamped ? 0.0
                  : ClippedPolicyLossGradient(ratio, s.advantage, tc.epsilon) *
                        ratio;
      policy.Backprop(params, t.observation, t.action_mask, t.action_index,
                      weight / policy_count[slot], tc.c2 / policy_count[slot],
                      policy_grads[slot]);

      if (tc.centralized_critic) {
        Mlp::Tape tape;
        const double v_new =
            critic.Forward(models_.critic, t.global_state, &tape)[0];
        if (first) {
          critic_loss += ValueFnLoss(v_new, t.value_estimate, s.target,
                                     tc.epsilon_vf) / total;
        }
        const double seed[1] = {-tc.c1 *
                                ValueFnLossGradient(v_new, t.value_estimate,
                                                    s.target, tc.epsilon_vf) /
                                total};
        critic.Backward(models_.critic, tape, seed, critic_grad);
      } else {
        const ValueNetParams& vp = models_.value_nets[slot];
        const double v_new = value_net.PredictState(vp, t.observation);
        if (first) {
          critic_loss += ValueFnLoss(v_new, t.value_estimate, s.target,
                                     tc.epsilon_vf) / total;
        }
        value_net.BackpropState(
            vp, t.observation,
            -tc.c1 *
                ValueFnLossGradient(v_new, t.value_estimate, s.target,
                                    tc.epsilon_vf) /
                policy_count[slot],
            value_grads[slot]);
      }
    }

    for (const ValueTarget& v : value_targets) {
      const std::size_t slot = models_.SlotOf(v.sample->agent);
      const ValueNetParams& vp = models_.value_nets[slot];
      const double predicted =
          value_net.Predict(vp, v.sample->message, v.sample->observation);
      if (first) {
        value_loss += ValueLoss(predicted, v.target) /
                      static_cast<double>(value_targets.size());
      }
      value_net.Backprop(vp, v.sample->message, v.sample->observation,
                         -ValueLossGradient(predicted, v.target) /
                             value_count[slot],
                         value_grads[slot]);
    }

    if (first) {
      stats.policy_objective = objective;
      stats.entropy = entropy;
      stats.critic_loss = critic_loss;
      stats.value_loss = value_loss;
      stats.first_ratio_deviation = deviation;
      if (!std::isfinite(objective) || !std::isfinite(entropy) ||
          !std::isfinite(critic_loss) || !std::isfinite(value_loss)) {
        throw TrainingDiverged("non-finite loss at epoch " +
                               std::to_string(stats.epoch));
      }
    }

    for (std::size_t slot = 0; slot < slots; ++slot) {
      state_->policy_optimizers[slot].Step(models_.policies[slot],
                                           policy_grads[slot]);
      std::vector<double> flat = models_.value_nets[slot].Flatten();
      state_->value_optimizers[slot].Step(flat, value_grads[slot].Flatten());
      models_.value_nets[slot] = value_net.Unflatten(flat);
    }
    if (tc.centralized_critic) {
      state_->critic_optimizer.Step(models_.critic, critic_grad);
    }
    if (!models_.AllFinite()) {
      throw TrainingDiverged("non-finite parameters at epoch " +
                             std::to_string(stats.epoch));
    }
  }
}

std::vector<EpisodeResult> CollectEpisodes(const Team& team,
                                           const AgentModels& models,
                                           std::span<const EpisodeSpec> specs,
                                           int workers) {
  std::vector<EpisodeResult> results(specs.size());
  if (workers <= 1 || specs.size() <= 1) {
    for (std::size_t k = 0; k < specs.size(); ++k) {
      results[k] = RunEpisode(team, models, specs[k]);
    }
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t k = next++; k < specs.size(); k = next++) {
      try {
        results[k] = RunEpisode(team, models, specs[k]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  const auto count =
      std::min<std::size_t>(static_cast<std::size_t>(workers), specs.size());
  for (std::size_t w = 0; w < count; ++w) threads.emplace_back(work);
  for (std::thread& t : threads) t.join();
  if (error) std::rethrow_exception(error);
  return results;
}

TrainingResult Train(const RunConfig& config, const TrainingOptions& options) {
  const Team team(config);
  TrainingResult result;
  result.initial = team.Init(DeriveSeed(config.seed, {0}));
  Learner learner(team, result.initial);
  const int per_epoch = config.training.episodes_per_epoch;
  for (int epoch = 0; epoch < config.training.epochs; ++epoch) {
    std::vector<EpisodeSpec> specs;
    for (int ep = 0; ep < per_epoch; ++ep) {
      const auto e = static_cast<std::uint64_t>(epoch);
      const auto k = static_cast<std::uint64_t>(ep);
      specs.push_back({DeriveSeed(config.seed, {1, e, k}),
                       DeriveSeed(config.seed, {2, e, k}), epoch,
                       e * static_cast<std::uint64_t>(per_epoch) + k});
    }
    const std::vector<EpisodeResult> episodes =
        CollectEpisodes(team, learner.models(), specs, options.workers);
    EpochStats stats = RolloutStats(epoch, episodes);
    learner.Update(episodes, stats);
    if (options.sink) {
      std::vector<RoundRecord> records;
      for (const EpisodeResult& e : episodes) {
        records.insert(records.end(), e.rounds.begin(), e.rounds.end());
      }
      options.sink(stats, records);
    }
    result.epochs.push_back(stats);
  }
  result.models = learner.models();
  return result;
}

EvalSummary Evaluate(const RunConfig& config, const AgentModels& models,
                     const EvalOptions& options) {
  if (options.episodes < 1) {
    throw std::invalid_argument("evaluation needs at least one episode");
  }
  const Team team(config);
  team.Check(models);
  std::vector<EpisodeSpec> specs;
  for (int k = 0; k < options.episodes; ++k) {
    const auto id = static_cast<std::uint64_t>(k);
    specs.push_back({DeriveSeed(options.seed, {3, id}),
                     DeriveSeed(options.seed, {4, id}), 0, id});
  }
  const std::vector<EpisodeResult> episodes =
      CollectEpisodes(team, models, specs, options.workers);
  EvalSummary summary;
  summary.episode_budget = config.budget.episode_budget;
  summary.hard_cap = config.budget.hard_cap;
  summary.episodes = options.episodes;
  double solved = 0.0, progress = 0.0;
  for (const EpisodeResult& e : episodes) {
    if (e.solved) solved += 1.0;
    progress += e.final_progress;
    summary.records.insert(summary.records.end(), e.rounds.begin(),
                           e.rounds.end());
  }
  summary.success_rate = solved / options.episodes;
  summary.mean_progress = progress / options.episodes;
  summary.tokens = TokenAccounting(summary.records);
  summary.broadcast =
      ComputeStrategyDistribution(summary.records, StrategyBasis::kBroadcast);
  summary.submitted =
      ComputeStrategyDistribution(summary.records, StrategyBasis::kSubmitted);
  return summary;
}

nlohmann::json CheckpointToJson(const RunConfig& config,
                                const AgentModels& models) {
  nlohmann::json value_nets = nlohmann::json::array();
  for (const ValueNetParams& v : models.value_nets) {
    value_nets.push_back(
        {{"message_encoder", v.message_encoder_weights},
         {"observation_encoder", v.observation_encoder_weights},
         {"fusion_and_head", v.fusion_and_head_weights}});
  }
  return {{"format", kCheckpointFormat},
          {"config_hash", ConfigHash(config)},
          {"compat_hash", CompatHash(config)},
          {"seed", config.seed},
          {"config", ToJson(config)},
          {"policies", models.policies},
          {"value_nets", std::move(value_nets)},
          {"critic", models.critic}};
}

Checkpoint CheckpointFromJson(const nlohmann::json& document) {
  try {
    if (document.at("format").get<std::string>() != kCheckpointFormat) {
      throw IncompatibleCheckpoint("unknown checkpoint format");
    }
    Checkpoint checkpoint;
    checkpoint.config = ParseRunConfig(document.at("config"));
    if (ConfigHash(checkpoint.config) !=
        document.at("config_hash").get<std::string>()) {
      throw IncompatibleCheckpoint("checkpoint config hash does not match");
    }
    checkpoint.models.policies =
        document.at("policies").get<std::vector<std::vector<double>>>();
    for (const auto& v : document.at("value_nets")) {
      checkpoint.models.value_nets.push_back(
          {v.at("message_encoder").get<std::vector<double>>(),
           v.at("observation_encoder").get<std::vector<double>>(),
           v.at("fusion_and_head").get<std::vector<double>>()});
    }
    checkpoint.models.critic = document.at("critic").get<std::vector<double>>();
    Team(checkpoint.config).Check(checkpoint.models);
    return checkpoint;
  } catch (const nlohmann::json::exception& e) {
    throw IncompatibleCheckpoint(std::string("malformed checkpoint: ") +
                                 e.what());
  } catch (const std::invalid_argument& e) {
    throw IncompatibleCheckpoint(std::string("malformed checkpoint: ") +
                                 e.what());
  }
}

void SaveCheckpoint(const std::filesystem::path& path, const RunConfig& config,
                    const AgentModels& models) {
  std::ofstream out(path, std::ios::out | std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << CheckpointToJson(config, models).dump() << '\n';
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json document;
  try {
    in >> document;
  } catch (const nlohmann::json::exception& e) {
    throw IncompatibleCheckpoint(std::string("malformed checkpoint: ") +
                                 e.what());
  }
  return CheckpointFromJson(document);
}

void CheckCompatible(const RunConfig& trained, const RunConfig& evaluated) {
  if (CompatHash(trained) != CompatHash(evaluated)) {
    throw IncompatibleCheckpoint(
        "checkpoint was trained under an incompatible config (" +
        CompatHash(trained) + " vs " + CompatHash(evaluated) + ")");
  }
}

}  // namespace dala
