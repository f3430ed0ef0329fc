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

#ifndef DALA_CONFIG_H_
#define DALA_CONFIG_H_

// Run configuration: every knob of the environment, budget, valuation,
// training and ablations. Documents are strict: every key is required and
// unknown keys are rejected, with all problems reported at once.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dala/env.h"
#include "dala/valuation.h"

namespace dala {

struct BudgetConfig {
  Tokens episode_budget = 64;
  Tokens hard_cap = 24;
};

struct ValuationConfig {
  DensityOptions density;
  TierThresholds thresholds;
  double tie_epsilon = 0.0;
};

struct TrainingConfig {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 0.99;
  double lambda = 0.95;
  double epsilon = 0.2;
  double epsilon_vf = 0.2;
  double c1 = 0.5;
  double c2 = 0.01;
  double lr = 3e-3;
  double momentum = 0.9;
  double grad_clip = 1.0;
  int epochs = 200;
  int episodes_per_epoch = 64;
  int update_iters = 8;
  bool share_parameters = false;
  bool centralized_critic = true;
  // Every agent receives alpha * delta; when false the team delta is split
  // evenly across agents.
  bool per_agent_task_reward = true;
};

// Switches for the component ablations.
struct AblationConfig {
  bool value_learning = true;  // false: bid on message length instead
  bool value_density = true;   // false: drop the 1/length factor
  bool tiered_content = true;  // false: Full or Silence only
  bool dynamic_budget = true;  // false: fixed per-round share
};

struct RunConfig {
  std::string run_id = "default";
  std::uint64_t seed = 1;
  EnvConfig env;
  BudgetConfig budget;
  ValuationConfig valuation;
  TrainingConfig training;
  AblationConfig ablation;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Throws ConfigError listing every missing, unknown or invalid key.
RunConfig ParseRunConfig(const nlohmann::json& document);
RunConfig LoadRunConfig(const std::filesystem::path& path);
nlohmann::json ToJson(const RunConfig& config);

// Throws ConfigError if any value breaks a module precondition.
void ValidateRunConfig(const RunConfig& config);

// FNV-1a over the canonical JSON of the whole config, as 16 hex digits.
std::string ConfigHash(const RunConfig& config);
// Same, over the parts a trained checkpoint depends on: environment shape,
// valuation, ablations and parameter sharing. Budgets, seeds and optimizer
// settings are excluded.
std::string CompatHash(const RunConfig& config);

std::string Fnv1aHex(const std::string& bytes);

}  // namespace dala

#endif  // DALA_CONFIG_H_
