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

#include <memory>
#include <random>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "gtest/gtest.h"

namespace dala {
namespace {

std::shared_ptr<const TaskInstance> Make(const EnvConfig& config,
                                         std::uint64_t seed) {
  return std::make_shared<const TaskInstance>(GenerateInstance(config, seed));
}

ShardId FirstShard(const TaskInstance& instance, bool critical) {
  for (const Shard& s : instance.shards) {
    if (s.critical == critical) return s.shard_id;
  }
  ADD_FAILURE() << "no shard with critical=" << critical;
  return 0;
}

TEST(GenerateInstance, DefaultShape) {
  EnvConfig config;
  const TaskInstance instance = GenerateInstance(config, 7);
  EXPECT_EQ(instance.shards.size(), 8u);
  EXPECT_EQ(instance.CriticalCount(), 4);
  for (AgentId a = 0; a < 4; ++a) EXPECT_EQ(instance.ShardsOf(a).size(), 2u);
  for (std::size_t k = 0; k < instance.shards.size(); ++k) {
    EXPECT_EQ(instance.shards[k].shard_id, k);
    EXPECT_EQ(instance.shards[k].feature_vector.size(), 4u);
  }
  EXPECT_LE(instance.required_critical_count, instance.CriticalCount());
}

TEST(GenerateInstance, Deterministic) {
  EnvConfig config;
  const nlohmann::json a = GenerateInstance(config, 7);
  const nlohmann::json b = GenerateInstance(config, 7);
  const nlohmann::json c = GenerateInstance(config, 8);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(GenerateInstance, ConfigErrors) {
  EnvConfig config;
  config.critical_ratio = 0.0;
  config.required_critical_count = 1;
  EXPECT_THROW(GenerateInstance(config, 1), std::invalid_argument);
  EnvConfig few;
  few.num_shards = 2;
  EXPECT_THROW(GenerateInstance(few, 1), std::invalid_argument);
  EnvConfig short_horizon;
  short_horizon.num_agents = 1;
  short_horizon.num_shards = 4;
  short_horizon.required_critical_count = 2;
  short_horizon.horizon = 1;
  EXPECT_THROW(GenerateInstance(short_horizon, 1), std::invalid_argument);
}

TEST(GenerateInstance, JsonRoundTrip) {
  const TaskInstance instance = GenerateInstance(EnvConfig{}, 3);
  const nlohmann::json j = instance;
  const TaskInstance back = j.get<TaskInstance>();
  EXPECT_EQ(nlohmann::json(back), j);
}

TEST(GenerateInstanceProperty, CriticalFeaturesCarryTheOffset) {
  EnvConfig config;
  config.feature_dim = 1;
  double critical = 0.0, other = 0.0;
  int nc = 0, no = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    for (const Shard& s : GenerateInstance(config, seed).shards) {
      (s.critical ? critical : other) += s.feature_vector[0];
      ++(s.critical ? nc : no);
    }
  }
  EXPECT_NEAR(critical / nc - other / no, config.critical_offset, 0.15);
}

TEST(GenerateInstanceProperty, SomeAgentIsNecessary) {
  // 4 critical shards, all required: whoever holds a critical shard is needed.
  EnvConfig config;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const TaskInstance instance = GenerateInstance(config, seed);
    bool someone_needed = false;
    for (AgentId a = 0; a < 4; ++a) {
      if (!instance.SolvableWithout(a)) someone_needed = true;
    }
    EXPECT_TRUE(someone_needed);
  }
  EnvConfig slack = config;
  slack.required_critical_count = 1;
  const TaskInstance easy = GenerateInstance(slack, 1);
  int needed = 0;
  for (AgentId a = 0; a < 4; ++a) needed += easy.SolvableWithout(a) ? 0 : 1;
  EXPECT_EQ(needed, 0);
}

TEST(CandidateMessages, SubsetEnumeration) {
  EnvConfig config;
  config.max_subset_size = 2;
  const auto instance = Make(config, 7);
  const EnvState state = InitialState(instance);
  const std::vector<ShardId> own = instance->ShardsOf(0);
  const auto candidates = CandidateMessages(state, 0, config);
  ASSERT_EQ(candidates.size(), 3u);
  EXPECT_EQ(candidates[0].shard_ids, std::vector<ShardId>{own[0]});
  EXPECT_EQ(candidates[1].shard_ids, std::vector<ShardId>{own[1]});
  EXPECT_EQ(candidates[2].shard_ids, own);
  for (const auto& m : candidates) {
    EXPECT_EQ(m.tier, Tier::kFull);
    EXPECT_EQ(m.token_len,
              config.tier_lengths.full * static_cast<Tokens>(m.shard_ids.size()));
  }
}

TEST(CandidateMessages, SingletonsAndRevealedShards) {
  EnvConfig config;
  config.num_agents = 2;
  config.num_shards = 6;
  config.required_critical_count = 2;
  const auto instance = Make(config, 2);
  EnvState state = InitialState(instance);
  EXPECT_EQ(CandidateMessages(state, 0, config).size(), 3u);
  const std::vector<ShardId> own = instance->ShardsOf(0);
  std::vector<CandidateMessage> all;
  for (ShardId id : own) all.push_back(MakeMessage({id}, Tier::kFull, config.tier_lengths));
  state = Step(state, all, config).state;
  EXPECT_TRUE(CandidateMessages(state, 0, config).empty());
  EXPECT_THROW(CandidateMessages(state, 5, config), std::invalid_argument);
}

TEST(Step, HalfOfRequiredCriticalShards) {
  EnvConfig config;
  config.required_critical_count = 2;
  const auto instance = Make(config, 7);
  const EnvState state = InitialState(instance);
  const ShardId c = FirstShard(*instance, true);
  const StepResult r =
      Step(state, {MakeMessage({c}, Tier::kFull, config.tier_lengths)}, config);
  EXPECT_DOUBLE_EQ(r.task_delta, 0.5);
  EXPECT_DOUBLE_EQ(r.state.progress, 0.5);
  EXPECT_EQ(r.state.round, 1);
  EXPECT_EQ(r.state.public_features[c], instance->shards[c].feature_vector);
}

TEST(Step, NonCriticalAndSilentRounds) {
  EnvConfig config;
  const auto instance = Make(config, 7);
  const EnvState state = InitialState(instance);
  const ShardId n = FirstShard(*instance, false);
  const StepResult r =
      Step(state, {MakeMessage({n}, Tier::kFull, config.tier_lengths)}, config);
  EXPECT_EQ(r.task_delta, 0.0);
  EXPECT_TRUE(r.state.IsRevealed(n));
  const StepResult silent = Step(state, {}, config);
  EXPECT_EQ(silent.task_delta, 0.0);
  EXPECT_TRUE(silent.state.revealed.empty());
  EXPECT_EQ(silent.state.progress, state.progress);
  const StepResult muted =
      Step(state, {MakeMessage({n}, Tier::kSilence, config.tier_lengths)}, config);
  EXPECT_TRUE(muted.state.revealed.empty());
}

TEST(Step, TierRevealSemantics) {
  EnvConfig config;
  config.keywords_credit = 0.5;
  const auto instance = Make(config, 7);
  const EnvState state = InitialState(instance);
  const ShardId c = FirstShard(*instance, true);
  const StepResult kw =
      Step(state, {MakeMessage({c}, Tier::kKeywords, config.tier_lengths)}, config);
  EXPECT_DOUBLE_EQ(kw.task_delta, 0.5 / 4.0);
  EXPECT_EQ(kw.state.public_features[c], std::vector<double>(4, 0.0));
  const StepResult sm =
      Step(state, {MakeMessage({c}, Tier::kSummary, config.tier_lengths)}, config);
  EXPECT_DOUBLE_EQ(sm.task_delta, 0.25);
  EXPECT_NE(sm.state.public_features[c], instance->shards[c].feature_vector);
  for (std::size_t f = 0; f < 4; ++f) {
    EXPECT_NEAR(sm.state.public_features[c][f],
                instance->shards[c].feature_vector[f], 5 * config.summary_noise);
  }
  // Re-broadcasting a revealed shard earns nothing.
  const StepResult again =
      Step(sm.state, {MakeMessage({c}, Tier::kFull, config.tier_lengths)}, config);
  EXPECT_EQ(again.task_delta, 0.0);
}

TEST(IsSolved, Examples) {
  EnvConfig config;
  const auto instance = Make(config, 7);
  EnvState state = InitialState(instance);
  EXPECT_FALSE(IsSolved(state));
  std::vector<CandidateMessage> critical;
  for (const Shard& s : instance->shards) {
    if (s.critical) critical.push_back(MakeMessage({s.shard_id}, Tier::kFull, config.tier_lengths));
  }
  const std::vector<CandidateMessage> half(critical.begin(), critical.begin() + 2);
  state = Step(state, half, config).state;
  EXPECT_DOUBLE_EQ(state.progress, 0.5);
  EXPECT_FALSE(IsSolved(state));
  state = Step(state, critical, config).state;
  EXPECT_DOUBLE_EQ(state.progress, 1.0);
  EXPECT_TRUE(IsSolved(state));
}

TEST(StepProperty, ProgressMonotoneAndDeterministic) {
  EnvConfig config;
  config.max_subset_size = 2;
  std::mt19937_64 rng(1);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto instance = Make(config, seed);
    EnvState a = InitialState(instance), b = InitialState(instance);
    for (int t = 0; t < config.horizon; ++t) {
      std::vector<CandidateMessage> winners;
      for (AgentId agent = 0; agent < 4; ++agent) {
        auto c = CandidateMessages(a, agent, config);
        if (c.empty() || rng() % 2) continue;
        CandidateMessage m = c[rng() % c.size()];
        winners.push_back(MakeMessage(m.shard_ids, kAllTiers[rng() % 4], config.tier_lengths));
      }
      const StepResult ra = Step(a, winners, config);
      const StepResult rb = Step(b, winners, config);
      EXPECT_GE(ra.task_delta, 0.0);
      EXPECT_GE(ra.state.progress, a.progress);
      EXPECT_LE(ra.state.progress, 1.0);
      EXPECT_EQ(ra.state.revealed, rb.state.revealed);
      EXPECT_EQ(ra.state.public_features, rb.state.public_features);
      for (const auto& [id, tier] : a.revealed) EXPECT_TRUE(ra.state.IsRevealed(id));
      a = ra.state;
      b = rb.state;
    }
  }
}

TEST(StepProperty, FullBroadcastsSolveEveryInstance) {
  EnvConfig config;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    EnvState state = InitialState(Make(config, seed));
    for (int t = 0; t < config.horizon; ++t) {
      std::vector<CandidateMessage> winners;
      for (AgentId agent = 0; agent < 4; ++agent) {
        auto c = CandidateMessages(state, agent, config);
        for (const auto& m : c) {
          if (ContainsCritical(*state.instance, m)) {
            winners.push_back(m);
            break;
          }
        }
      }
      state = Step(state, winners, config).state;
    }
    EXPECT_TRUE(IsSolved(state)) << "seed " << seed;
  }
}

TEST(ActionSpace, SlotsMaskAndMessages) {
  EnvConfig config;
  config.max_subset_size = 2;
  EXPECT_EQ(NumActions(config), 4u);  // nothing, {0}, {1}, {0,1}
  const auto instance = Make(config, 7);
  EnvState state = InitialState(instance);
  EXPECT_EQ(ActionMask(state, 0, config), std::vector<bool>(4, true));
  EXPECT_FALSE(SlotMessage(state, 0, 0, config).has_value());
  const std::vector<ShardId> own = instance->ShardsOf(0);
  state = Step(state, {MakeMessage({own[0]}, Tier::kFull, config.tier_lengths)}, config).state;
  EXPECT_EQ(ActionMask(state, 0, config), (std::vector<bool>{true, false, true, false}));
  EXPECT_EQ(SlotMessage(state, 0, 2, config)->shard_ids, std::vector<ShardId>{own[1]});
}

TEST(Features, Dimensions) {
  EnvConfig config;
  const auto instance = Make(config, 7);
  const EnvState state = InitialState(instance);
  EXPECT_EQ(Observe(state, 1, 0.5, config).Flatten().size(), ObservationDim(config));
  EXPECT_EQ(GlobalState(state, 0.5, config).size(), GlobalStateDim(config));
  const auto m = CandidateMessages(state, 1, config).front();
  EXPECT_EQ(MessageFeatures(*instance, m, config).size(), MessageDim(config));
  const Observation o = Observe(state, 1, 0.25, config);
  EXPECT_EQ(o.budget_warning, 0.25);
  EXPECT_EQ(o.round_fraction, 0.0);
}

}  // namespace
}  // namespace dala
