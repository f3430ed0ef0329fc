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

#include "dala/budget.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace dala {

BudgetState BudgetState::Create(Tokens episode_budget, int horizon,
                                Tokens hard_cap, bool dynamic) {
  if (episode_budget < 0) {
    throw std::invalid_argument("episode_budget must be >= 0");
  }
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (hard_cap < 1) throw std::invalid_argument("hard_cap must be >= 1");
  BudgetState state;
  state.episode_budget_ = episode_budget;
  state.horizon_ = horizon;
  state.hard_cap_ = hard_cap;
  state.dynamic_ = dynamic;
  return state;
}

BudgetState BudgetState::FromHistory(Tokens episode_budget, int horizon,
                                     Tokens hard_cap, std::vector<Tokens> history,
                                     bool dynamic) {
  BudgetState state = Create(episode_budget, horizon, hard_cap, dynamic);
  if (history.size() > static_cast<std::size_t>(horizon)) {
    throw std::invalid_argument("spend history is longer than the horizon");
  }
  Tokens total = 0;
  for (Tokens c : history) {
    if (c < 0) throw std::invalid_argument("round cost must be >= 0");
    total += c;
  }
  if (total > episode_budget) {
    throw std::invalid_argument("spend history exceeds the episode budget");
  }
  state.spend_history_ = std::move(history);
  return state;
}

Tokens BudgetState::Spent() const {
  return std::accumulate(spend_history_.begin(), spend_history_.end(),
                         Tokens{0});
}

double RoundBudget(const BudgetState& state) {
  if (state.Exhausted()) {
    throw std::out_of_range("round " + std::to_string(state.current_round()) +
                            " is past the horizon of " +
                            std::to_string(state.horizon()));
  }
  const auto remaining = static_cast<double>(state.Remaining());
  if (!state.dynamic()) {
    const double share = static_cast<double>(state.episode_budget()) /
                         static_cast<double>(state.horizon());
    return std::min(share, remaining);
  }
  const int rounds_left = state.horizon() - state.current_round() + 1;
  return remaining / static_cast<double>(rounds_left);
}

Tokens EffectiveCap(const BudgetState& state) {
  const double cap =
      std::min(RoundBudget(state), static_cast<double>(state.hard_cap()));
  return static_cast<Tokens>(std::floor(cap));
}

BudgetState Charge(const BudgetState& state, Tokens cost) {
  if (cost < 0) throw std::invalid_argument("round cost must be >= 0");
  const Tokens cap = EffectiveCap(state);
  if (cost > cap) {
    throw OverdraftError("round " + std::to_string(state.current_round()) +
                         " cost " + std::to_string(cost) +
                         " exceeds the effective cap " + std::to_string(cap));
  }
  BudgetState next = state;
  next.spend_history_.push_back(cost);
  return next;
}

double BudgetWarningLevel(const BudgetState& state) {
  if (state.episode_budget() == 0) return 0.0;
  return static_cast<double>(state.Remaining()) /
         static_cast<double>(state.episode_budget());
}

}  // namespace dala
