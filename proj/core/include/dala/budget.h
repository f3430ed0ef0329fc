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

#ifndef DALA_BUDGET_H_
#define DALA_BUDGET_H_

// Three-level token budget: an episode ledger, a per-round allowance that
// spreads what is left over the remaining rounds, and a hard cap per round.
// The auction's knapsack capacity is the floor of the smaller of the last two.

#include <span>
#include <stdexcept>
#include <vector>

#include "dala/types.h"

namespace dala {

class OverdraftError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class BudgetState {
 public:
  // Throws std::invalid_argument unless episode_budget >= 0, horizon >= 1
  // and hard_cap >= 1. With `dynamic` false the round allowance is the fixed
  // share episode_budget / horizon (bounded by what remains).
  static BudgetState Create(Tokens episode_budget, int horizon, Tokens hard_cap,
                            bool dynamic = true);
  // Rebuilds a state from recorded per-round spend, e.g. to replay a
  // telemetry stream. Throws std::invalid_argument if the history is longer
  // than the horizon, holds a negative entry or exceeds the episode budget.
  static BudgetState FromHistory(Tokens episode_budget, int horizon,
                                 Tokens hard_cap, std::vector<Tokens> history,
                                 bool dynamic = true);

  Tokens episode_budget() const { return episode_budget_; }
  int horizon() const { return horizon_; }
  Tokens hard_cap() const { return hard_cap_; }
  bool dynamic() const { return dynamic_; }
  // 1-based; horizon + 1 once every round has been charged.
  int current_round() const { return static_cast<int>(spend_history_.size()) + 1; }
  const std::vector<Tokens>& spend_history() const { return spend_history_; }

  Tokens Spent() const;
  Tokens Remaining() const { return episode_budget_ - Spent(); }
  bool Exhausted() const { return current_round() > horizon_; }

  friend bool operator==(const BudgetState&, const BudgetState&) = default;

 private:
  friend BudgetState Charge(const BudgetState& state, Tokens cost);

  Tokens episode_budget_ = 0;
  int horizon_ = 1;
  Tokens hard_cap_ = 1;
  bool dynamic_ = true;
  std::vector<Tokens> spend_history_;
};

// (episode_budget - spent) / (horizon - t + 1). Throws std::out_of_range
// once the horizon has passed.
double RoundBudget(const BudgetState& state);

// floor(min(RoundBudget, hard_cap)).
Tokens EffectiveCap(const BudgetState& state);

// Records `cost` for the current round and advances to the next one.
// Throws OverdraftError if cost exceeds EffectiveCap, std::invalid_argument
// on a negative cost.
BudgetState Charge(const BudgetState& state, Tokens cost);

// Remaining fraction of the episode budget, in [0, 1]; 0 for a zero budget.
double BudgetWarningLevel(const BudgetState& state);

}  // namespace dala

#endif  // DALA_BUDGET_H_
