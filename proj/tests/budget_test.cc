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

#include <cmath>
#include <random>
#include <stdexcept>

#include "gtest/gtest.h"

namespace dala {
namespace {

TEST(RoundBudget, Examples) {
  BudgetState s = BudgetState::Create(100, 5, 15);
  EXPECT_EQ(s.current_round(), 1);
  EXPECT_DOUBLE_EQ(RoundBudget(s), 20.0);
  s = BudgetState::FromHistory(100, 5, 40, {30});
  EXPECT_EQ(s.current_round(), 2);
  EXPECT_DOUBLE_EQ(RoundBudget(s), 17.5);
}

TEST(RoundBudget, FullySpentIsZero) {
  BudgetState s = BudgetState::Create(20, 3, 20);
  s = Charge(s, 6);
  s = Charge(s, 7);
  s = Charge(s, 7);
  EXPECT_TRUE(s.Exhausted());
  EXPECT_THROW(RoundBudget(s), std::out_of_range);
  const BudgetState t = BudgetState::FromHistory(20, 3, 20, {10, 10});
  EXPECT_DOUBLE_EQ(RoundBudget(t), 0.0);
  EXPECT_EQ(EffectiveCap(t), 0);
}

TEST(EffectiveCap, Examples) {
  const BudgetState capped = BudgetState::Create(100, 5, 15);
  EXPECT_EQ(EffectiveCap(capped), 15);
  const BudgetState s15 = BudgetState::FromHistory(100, 5, 15, {30});
  EXPECT_DOUBLE_EQ(RoundBudget(s15), 17.5);
  EXPECT_EQ(EffectiveCap(s15), 15);
  EXPECT_EQ(EffectiveCap(BudgetState::FromHistory(100, 5, 30, {30})), 17);
  const BudgetState twelve = BudgetState::Create(60, 5, 15);
  EXPECT_DOUBLE_EQ(RoundBudget(twelve), 12.0);
  EXPECT_EQ(EffectiveCap(twelve), 12);
  EXPECT_EQ(EffectiveCap(BudgetState::Create(0, 4, 8)), 0);
}

TEST(EffectiveCap, RoundBudgetAboveHardCap) {
  // Spend 30 over two rounds so the third sees 70 / 4 = 17.5 > 15.
  BudgetState t = BudgetState::Create(100, 6, 15);
  t = Charge(t, 15);
  t = Charge(t, 15);
  EXPECT_DOUBLE_EQ(RoundBudget(t), 17.5);
  EXPECT_EQ(EffectiveCap(t), 15);
}

TEST(Charge, Bookkeeping) {
  BudgetState s = BudgetState::Create(100, 5, 15);
  s = Charge(s, 6);
  EXPECT_EQ(s.spend_history(), std::vector<Tokens>{6});
  EXPECT_EQ(s.current_round(), 2);
  s = Charge(s, 0);
  EXPECT_EQ(s.spend_history(), (std::vector<Tokens>{6, 0}));
  EXPECT_EQ(s.Spent(), 6);
  EXPECT_EQ(s.Remaining(), 94);
}

TEST(Charge, OverdraftAndNegativeCost) {
  const BudgetState s = BudgetState::Create(100, 5, 15);
  EXPECT_THROW(Charge(s, 16), OverdraftError);
  EXPECT_THROW(Charge(s, -1), std::invalid_argument);
  EXPECT_NO_THROW(Charge(s, 15));
}

TEST(BudgetState, CreateValidates) {
  EXPECT_THROW(BudgetState::Create(-1, 4, 8), std::invalid_argument);
  EXPECT_THROW(BudgetState::Create(10, 0, 8), std::invalid_argument);
  EXPECT_THROW(BudgetState::Create(10, 4, 0), std::invalid_argument);
}

TEST(BudgetState, FromHistoryValidates) {
  EXPECT_THROW(BudgetState::FromHistory(10, 2, 5, {1, 1, 1}), std::invalid_argument);
  EXPECT_THROW(BudgetState::FromHistory(10, 2, 5, {-1}), std::invalid_argument);
  EXPECT_THROW(BudgetState::FromHistory(10, 2, 5, {6, 5}), std::invalid_argument);
  const BudgetState s = BudgetState::FromHistory(10, 2, 5, {4, 6});
  EXPECT_TRUE(s.Exhausted());
  EXPECT_EQ(s.Remaining(), 0);
}

TEST(BudgetWarningLevel, Examples) {
  EXPECT_EQ(BudgetWarningLevel(BudgetState::Create(40, 4, 40)), 1.0);
  EXPECT_EQ(BudgetWarningLevel(BudgetState::FromHistory(40, 4, 40, {10, 10})), 0.5);
  EXPECT_EQ(BudgetWarningLevel(BudgetState::FromHistory(40, 4, 40, {30, 10})), 0.0);
  EXPECT_EQ(BudgetWarningLevel(BudgetState::Create(0, 4, 8)), 0.0);
}

TEST(FixedShare, RoundAllowanceIsConstantUntilFundsRunOut) {
  BudgetState s = BudgetState::Create(40, 4, 40, /*dynamic=*/false);
  EXPECT_DOUBLE_EQ(RoundBudget(s), 10.0);
  s = Charge(s, 0);
  EXPECT_DOUBLE_EQ(RoundBudget(s), 10.0);
}

// Random spend at the cap, replayed against the closed form.
TEST(BudgetProperty, ConservationAndDepletion) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<Tokens> budget(0, 200);
    std::uniform_int_distribution<int> horizon(1, 10);
    std::uniform_int_distribution<Tokens> cap(1, 50);
    const Tokens b = budget(rng);
    const int t_max = horizon(rng);
    BudgetState s = BudgetState::Create(b, t_max, cap(rng));
    Tokens prev_remaining = s.Remaining();
    while (!s.Exhausted()) {
      Tokens spent = 0;
      for (Tokens c : s.spend_history()) spent += c;
      const int rounds_left = t_max - s.current_round() + 1;
      EXPECT_DOUBLE_EQ(RoundBudget(s),
                       static_cast<double>(b - spent) / rounds_left);
      const Tokens c = EffectiveCap(s);
      EXPECT_GE(c, 0);
      std::uniform_int_distribution<Tokens> cost(0, c);
      s = Charge(s, cost(rng));
      EXPECT_LE(s.Remaining(), prev_remaining);
      prev_remaining = s.Remaining();
      EXPECT_EQ(static_cast<int>(s.spend_history().size()),
                s.current_round() - 1);
    }
    EXPECT_LE(s.Spent(), b);
    EXPECT_GE(s.Remaining(), 0);
  }
}

}  // namespace
}  // namespace dala
