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

#include "dala/config.h"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace dala {
namespace {

// Walks one JSON object, collecting problems instead of throwing so that a
// single pass reports everything wrong with the document.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& object, std::string path,
               std::vector<std::string>& problems)
      : object_(object), path_(std::move(path)), problems_(problems) {
    if (!object_.is_object()) {
      problems_.push_back(path_ + ": expected an object");
      valid_ = false;
    }
  }

  ObjectReader(const ObjectReader&) = delete;
  ObjectReader& operator=(const ObjectReader&) = delete;

  ~ObjectReader() {
    if (!valid_) return;
    for (const auto& [key, value] : object_.items()) {
      if (!seen_.contains(key)) {
        problems_.push_back(Name(key) + ": unknown key");
      }
    }
  }

  template <typename T>
  void Read(const std::string& key, T& out) {
    const nlohmann::json* value = Find(key);
    if (value == nullptr) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!value->is_boolean()) throw std::invalid_argument("not a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!value->is_number_integer()) {
          throw std::invalid_argument("not an integer");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!value->is_number()) throw std::invalid_argument("not a number");
      } else {
        if (!value->is_string()) throw std::invalid_argument("not a string");
      }
      out = value->get<T>();
    } catch (const std::exception& e) {
      problems_.push_back(Name(key) + ": " + e.what());
    }
  }

  // Returns the nested object, or nullptr if it is missing.
  const nlohmann::json* Child(const std::string& key) { return Find(key); }

  std::string Name(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  const nlohmann::json* Find(const std::string& key) {
    seen_.insert(key);
    if (!valid_) return nullptr;
    auto it = object_.find(key);
    if (it == object_.end()) {
      problems_.push_back(Name(key) + ": missing key");
      return nullptr;
    }
    return &*it;
  }

  const nlohmann::json& object_;
  std::string path_;
  std::vector<std::string>& problems_;
  std::set<std::string> seen_;
  bool valid_ = true;
};

void ReadTierLengths(ObjectReader& parent, const std::string& key,
                     TierLengths& out, std::vector<std::string>& problems) {
  if (const nlohmann::json* j = parent.Child(key)) {
    ObjectReader r(*j, parent.Name(key), problems);
    r.Read("full", out.full);
    r.Read("summary", out.summary);
    r.Read("keywords", out.keywords);
  }
}

void ReadThresholds(ObjectReader& parent, const std::string& key,
                    TierThresholds& out, std::vector<std::string>& problems) {
  if (const nlohmann::json* j = parent.Child(key)) {
    ObjectReader r(*j, parent.Name(key), problems);
    r.Read("full", out.full);
    r.Read("summary", out.summary);
    r.Read("keywords", out.keywords);
  }
}

void Check(bool ok, const std::string& message,
           std::vector<std::string>& problems) {
  if (!ok) problems.push_back(message);
}

std::vector<std::string> Validate(const RunConfig& c) {
  std::vector<std::string> problems;
  Check(!c.run_id.empty() &&
            c.run_id.find_first_not_of(
                "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-.") ==
                std::string::npos &&
            c.run_id != "." && c.run_id != "..",
        "run_id: must be a non-empty name of letters, digits, '_', '-' or '.'",
        problems);
  try {
    c.env.Validate();
  } catch (const std::invalid_argument& e) {
    problems.push_back(std::string("env: ") + e.what());
  }
  Check(c.budget.episode_budget >= 0, "budget.episode_budget: must be >= 0",
        problems);
  Check(c.budget.hard_cap >= 1, "budget.hard_cap: must be >= 1", problems);
  Check(c.valuation.density.epsilon > 0.0, "valuation.epsilon: must be > 0",
        problems);
  Check(c.valuation.density.raw_value_scale != 0.0,
        "valuation.raw_value_scale: must be non-zero", problems);
  Check(c.valuation.tie_epsilon >= 0.0, "valuation.tie_epsilon: must be >= 0",
        problems);
  try {
    c.valuation.thresholds.Validate();
  } catch (const std::invalid_argument& e) {
    problems.push_back(std::string("valuation.thresholds: ") + e.what());
  }
  const TrainingConfig& t = c.training;
  Check(t.alpha >= 0.0, "training.alpha: must be >= 0", problems);
  Check(t.beta >= 0.0, "training.beta: must be >= 0", problems);
  Check(t.gamma >= 0.0 && t.gamma <= 1.0, "training.gamma: must lie in [0, 1]",
        problems);
  Check(t.lambda >= 0.0 && t.lambda <= 1.0,
        "training.lambda: must lie in [0, 1]", problems);
  Check(t.epsilon > 0.0 && t.epsilon < 1.0,
        "training.epsilon: must lie in (0, 1)", problems);
  Check(t.epsilon_vf > 0.0, "training.epsilon_vf: must be > 0", problems);
  Check(t.c1 >= 0.0, "training.c1: must be >= 0", problems);
  Check(t.c2 >= 0.0, "training.c2: must be >= 0", problems);
  Check(t.lr > 0.0, "training.lr: must be > 0", problems);
  Check(t.momentum >= 0.0 && t.momentum < 1.0,
        "training.momentum: must lie in [0, 1)", problems);
  Check(t.grad_clip > 0.0, "training.grad_clip: must be > 0", problems);
  Check(t.epochs >= 0, "training.epochs: must be >= 0", problems);
  Check(t.episodes_per_epoch >= 1, "training.episodes_per_epoch: must be >= 1",
        problems);
  Check(t.update_iters >= 1, "training.update_iters: must be >= 1", problems);
  return problems;
}

std::string JoinProblems(const std::vector<std::string>& problems) {
  std::string text = "invalid run config:";
  for (const std::string& p : problems) text += "\n  " + p;
  return text;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(JoinProblems(problems)),
      problems_(std::move(problems)) {}

RunConfig ParseRunConfig(const nlohmann::json& document) {
  RunConfig c;
  std::vector<std::string> problems;
  {
    ObjectReader root(document, "", problems);
    root.Read("run_id", c.run_id);
    root.Read("seed", c.seed);

    if (const nlohmann::json* j = root.Child("env")) {
      ObjectReader r(*j, "env", problems);
      r.Read("num_agents", c.env.num_agents);
      r.Read("num_shards", c.env.num_shards);
      r.Read("critical_ratio", c.env.critical_ratio);
      r.Read("required_critical_count", c.env.required_critical_count);
      r.Read("horizon", c.env.horizon);
      r.Read("feature_dim", c.env.feature_dim);
      r.Read("critical_offset", c.env.critical_offset);
      r.Read("max_subset_size", c.env.max_subset_size);
      ReadTierLengths(r, "tier_lengths", c.env.tier_lengths, problems);
      r.Read("keywords_credit", c.env.keywords_credit);
      r.Read("summary_noise", c.env.summary_noise);
    }
    if (const nlohmann::json* j = root.Child("budget")) {
      ObjectReader r(*j, "budget", problems);
      r.Read("episode_budget", c.budget.episode_budget);
      r.Read("hard_cap", c.budget.hard_cap);
    }
    if (const nlohmann::json* j = root.Child("valuation")) {
      ObjectReader r(*j, "valuation", problems);
      r.Read("epsilon", c.valuation.density.epsilon);
      ReadThresholds(r, "thresholds", c.valuation.thresholds, problems);
      std::string mode = "scaled";
      r.Read("fallback_mode", mode);
      if (mode == "scaled") {
        c.valuation.density.single_candidate =
            SingleCandidateMode::kScaledFallback;
      } else if (mode == "literal") {
        c.valuation.density.single_candidate = SingleCandidateMode::kLiteral;
      } else {
        problems.push_back(
            "valuation.fallback_mode: expected \"scaled\" or \"literal\"");
      }
      r.Read("raw_value_scale", c.valuation.density.raw_value_scale);
      r.Read("tie_epsilon", c.valuation.tie_epsilon);
    }
    if (const nlohmann::json* j = root.Child("training")) {
      ObjectReader r(*j, "training", problems);
      TrainingConfig& t = c.training;
      r.Read("alpha", t.alpha);
      r.Read("beta", t.beta);
      r.Read("gamma", t.gamma);
      r.Read("lambda", t.lambda);
      r.Read("epsilon", t.epsilon);
      r.Read("epsilon_vf", t.epsilon_vf);
      r.Read("c1", t.c1);
      r.Read("c2", t.c2);
      r.Read("lr", t.lr);
      r.Read("momentum", t.momentum);
      r.Read("grad_clip", t.grad_clip);
      r.Read("epochs", t.epochs);
      r.Read("episodes_per_epoch", t.episodes_per_epoch);
      r.Read("update_iters", t.update_iters);
      r.Read("share_parameters", t.share_parameters);
      r.Read("centralized_critic", t.centralized_critic);
      r.Read("per_agent_task_reward", t.per_agent_task_reward);
    }
    if (const nlohmann::json* j = root.Child("ablation")) {
      ObjectReader r(*j, "ablation", problems);
      r.Read("value_learning", c.ablation.value_learning);
      r.Read("value_density", c.ablation.value_density);
      r.Read("tiered_content", c.ablation.tiered_content);
      r.Read("dynamic_budget", c.ablation.dynamic_budget);
    }
  }
  // Unreadable keys keep their defaults, so validating the rest is safe.
  for (std::string& p : Validate(c)) problems.push_back(std::move(p));
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path.string()});
  nlohmann::json document;
  try {
    document = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
  return ParseRunConfig(document);
}

void ValidateRunConfig(const RunConfig& config) {
  std::vector<std::string> problems = Validate(config);
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

nlohmann::json ToJson(const RunConfig& c) {
  const TierLengths& tl = c.env.tier_lengths;
  const TierThresholds& th = c.valuation.thresholds;
  const TrainingConfig& t = c.training;
  return {
      {"run_id", c.run_id},
      {"seed", c.seed},
      {"env",
       {{"num_agents", c.env.num_agents},
        {"num_shards", c.env.num_shards},
        {"critical_ratio", c.env.critical_ratio},
        {"required_critical_count", c.env.required_critical_count},
        {"horizon", c.env.horizon},
        {"feature_dim", c.env.feature_dim},
        {"critical_offset", c.env.critical_offset},
        {"max_subset_size", c.env.max_subset_size},
        {"tier_lengths",
         {{"full", tl.full}, {"summary", tl.summary}, {"keywords", tl.keywords}}},
        {"keywords_credit", c.env.keywords_credit},
        {"summary_noise", c.env.summary_noise}}},
      {"budget",
       {{"episode_budget", c.budget.episode_budget},
        {"hard_cap", c.budget.hard_cap}}},
      {"valuation",
       {{"epsilon", c.valuation.density.epsilon},
        {"thresholds",
         {{"full", th.full}, {"summary", th.summary}, {"keywords", th.keywords}}},
        {"fallback_mode", c.valuation.density.single_candidate ==
                                  SingleCandidateMode::kLiteral
                              ? "literal"
                              : "scaled"},
        {"raw_value_scale", c.valuation.density.raw_value_scale},
        {"tie_epsilon", c.valuation.tie_epsilon}}},
      {"training",
       {{"alpha", t.alpha},
        {"beta", t.beta},
        {"gamma", t.gamma},
        {"lambda", t.lambda},
        {"epsilon", t.epsilon},
        {"epsilon_vf", t.epsilon_vf},
        {"c1", t.c1},
        {"c2", t.c2},
        {"lr", t.lr},
        {"momentum", t.momentum},
        {"grad_clip", t.grad_clip},
        {"epochs", t.epochs},
        {"episodes_per_epoch", t.episodes_per_epoch},
        {"update_iters", t.update_iters},
        {"share_parameters", t.share_parameters},
        {"centralized_critic", t.centralized_critic},
        {"per_agent_task_reward", t.per_agent_task_reward}}},
      {"ablation",
       {{"value_learning", c.ablation.value_learning},
        {"value_density", c.ablation.value_density},
        {"tiered_content", c.ablation.tiered_content},
        {"dynamic_budget", c.ablation.dynamic_budget}}},
  };
}

std::string Fnv1aHex(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char byte : bytes) {
    hash ^= byte;
    hash *= 0x100000001b3ull;
  }
  char text[17];
  std::snprintf(text, sizeof(text), "%016llx",
                static_cast<unsigned long long>(hash));
  return text;
}

std::string ConfigHash(const RunConfig& config) {
  return Fnv1aHex(ToJson(config).dump());
}

std::string CompatHash(const RunConfig& config) {
  const nlohmann::json full = ToJson(config);
  const nlohmann::json shape = {
      {"env", full.at("env")},
      {"valuation", full.at("valuation")},
      {"ablation", full.at("ablation")},
      {"share_parameters", config.training.share_parameters},
      {"centralized_critic", config.training.centralized_critic},
  };
  return Fnv1aHex(shape.dump());
}

}  // namespace dala
