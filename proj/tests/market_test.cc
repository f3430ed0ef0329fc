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

#include "dala/market.h"

#include <random>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"
#include "test_support.h"

namespace dala {
namespace {

using ::dala::testing::EnumerateOptimum;
using ::dala::testing::RandomGridBids;
using ::dala::testing::RandomRealBids;
using ::dala::testing::Without;

// a=0, b=1, c=2.
std::vector<Bid> ThreeBids() {
  return {{0, 3.0, 4, 0}, {1, 2.0, 3, 1}, {2, 2.0, 3, 2}};
}

TEST(FilterValidBids, KeepsBidsThatFitInInputOrder) {
  const std::vector<Bid> bids = {{7, 0.5, 4, 0}, {2, 0.9, 10, 1}, {3, 0.1, 6, 2}};
  const std::vector<Bid> kept = FilterValidBids(bids, 6);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].agent_id, 7u);
  EXPECT_EQ(kept[1].agent_id, 3u);
}

TEST(FilterValidBids, EmptyAndZeroBudget) {
  EXPECT_TRUE(FilterValidBids({}, 100).empty());
  const std::vector<Bid> one = {{1, 0.5, 4, 0}};
  EXPECT_TRUE(FilterValidBids(one, 0).empty());
}

TEST(FilterValidBids, NegativeBudgetThrows) {
  EXPECT_THROW(FilterValidBids({}, -1), std::invalid_argument);
}

TEST(ValidateBids, RejectsMalformedBids) {
  const std::vector<Bid> negative = {{0, -0.1, 1, 0}};
  const std::vector<Bid> zero_len = {{0, 0.1, 0, 0}};
  const std::vector<Bid> duplicate = {{0, 0.1, 1, 0}, {0, 0.2, 1, 1}};
  const std::vector<Bid> nan = {{0, std::nan(""), 1, 0}};
  EXPECT_THROW(ValidateBids(negative), std::invalid_argument);
  EXPECT_THROW(ValidateBids(zero_len), std::invalid_argument);
  EXPECT_THROW(ValidateBids(duplicate), std::invalid_argument);
  EXPECT_THROW(ValidateBids(nan), std::invalid_argument);
}

TEST(SolveWdp, TwoCheapBidsBeatOneExpensive) {
  const auto bids = ThreeBids();
  EXPECT_EQ(SolveWdp(bids, 6), (std::vector<AgentId>{1, 2}));
  EXPECT_EQ(EnumerateOptimum(bids, 6).winners, (std::vector<AgentId>{1, 2}));
}

TEST(SolveWdp, SingleFeasibleItem) {
  const std::vector<Bid> bids = {{0, 1.0, 5, 0}};
  EXPECT_EQ(SolveWdp(bids, 5), (std::vector<AgentId>{0}));
}

TEST(SolveWdp, EqualBidsBreakTowardSmallerId) {
  const std::vector<Bid> bids = {{1, 2.0, 3, 0}, {0, 2.0, 3, 1}};
  EXPECT_EQ(SolveWdp(bids, 3), (std::vector<AgentId>{0}));
}

TEST(SolveWdp, EqualValuePrefersShorterSet) {
  // {0} and {1, 2} both reach 2.0; {0} uses 5 tokens, {1, 2} uses 4.
  const std::vector<Bid> bids = {{0, 2.0, 5, 0}, {1, 1.0, 2, 1}, {2, 1.0, 2, 2}};
  EXPECT_EQ(SolveWdp(bids, 6), (std::vector<AgentId>{1, 2}));
}

TEST(SolveWdp, EqualValueAndLengthPrefersLexicographicTuple) {
  // {0, 3} and {1, 2}: same value, same length; (0, 3) < (1, 2).
  const std::vector<Bid> bids = {
      {3, 1.0, 2, 0}, {2, 1.0, 2, 1}, {1, 1.0, 2, 2}, {0, 1.0, 2, 3}};
  EXPECT_EQ(SolveWdp(bids, 4), (std::vector<AgentId>{0, 1}));
  const std::vector<Bid> uneven = {
      {0, 1.5, 3, 0}, {3, 0.5, 1, 1}, {1, 1.0, 2, 2}, {2, 1.0, 2, 3}};
  EXPECT_EQ(SolveWdp(uneven, 4), (std::vector<AgentId>{0, 3}));
  EXPECT_EQ(EnumerateOptimum(uneven, 4).winners, (std::vector<AgentId>{0, 3}));
}

TEST(SolveWdp, IgnoresInfeasibleItemsAndZeroBudget) {
  const std::vector<Bid> bids = {{0, 9.0, 50, 0}, {1, 1.0, 2, 1}};
  EXPECT_EQ(SolveWdp(bids, 10), (std::vector<AgentId>{1}));
  EXPECT_TRUE(SolveWdp(bids, 0).empty());
  EXPECT_TRUE(SolveWdp({}, 10).empty());
}

TEST(SolveWdp, ZeroValueBidsNeverWin) {
  const std::vector<Bid> bids = {{0, 0.0, 1, 0}, {1, 0.0, 1, 1}};
  EXPECT_TRUE(SolveWdp(bids, 10).empty());
}

TEST(SolveWdp, MatchesEnumerationOnGridValues) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = static_cast<int>(rng() % 11) + 1;
    const Tokens b_max = static_cast<Tokens>(rng() % 40);
    const auto bids = RandomGridBids(rng, n, 15);
    const auto oracle = EnumerateOptimum(bids, b_max);
    const auto winners = SolveWdp(bids, b_max);
    ASSERT_EQ(winners, oracle.winners) << "trial " << trial;
    EXPECT_EQ(SetValue(bids, winners), oracle.value);
  }
}

TEST(BruteForceWdp, AgreesWithDpOnTwelveRandomBids) {
  std::mt19937_64 rng(5);
  for (int seed = 0; seed < 100; ++seed) {
    const auto bids = RandomRealBids(rng, 12, 20);
    const Tokens b_max = static_cast<Tokens>(rng() % 61);
    EXPECT_EQ(BruteForceWdp(bids, b_max), SolveWdp(bids, b_max));
  }
}

TEST(BruteForceWdp, ThreeBidExampleAndEmptyInput) {
  EXPECT_EQ(BruteForceWdp(ThreeBids(), 6), (std::vector<AgentId>{1, 2}));
  EXPECT_TRUE(BruteForceWdp({}, 6).empty());
}

TEST(BruteForceWdp, RejectsOversizedInput) {
  std::vector<Bid> bids;
  for (AgentId i = 0; i <= kBruteForceMaxBids; ++i) bids.push_back({i, 1.0, 1, i});
  EXPECT_THROW(BruteForceWdp(bids, 5), std::invalid_argument);
}

TEST(VcgPayment, ThreeBidExample) {
  const auto bids = ThreeBids();
  const std::vector<AgentId> winners = {1, 2};
  // V(W^-b) = value of the best set over {a, c} = 3.0; minus value(c) = 2.0.
  const double oracle_b =
      EnumerateOptimum(Without(bids, 1), 6).value - bids[2].bid_value;
  EXPECT_DOUBLE_EQ(oracle_b, 1.0);
  EXPECT_DOUBLE_EQ(VcgPayment(bids, winners, 1, 6), oracle_b);
  EXPECT_DOUBLE_EQ(VcgPayment(bids, winners, 2, 6), 1.0);
}

TEST(VcgPayment, SoleBidderPaysNothing) {
  const std::vector<Bid> bids = {{4, 2.5, 3, 0}};
  EXPECT_EQ(VcgPayment(bids, std::vector<AgentId>{4}, 4, 10), 0.0);
}

TEST(VcgPayment, NonCompetingBiddersPayNothing) {
  const std::vector<Bid> bids = {{0, 1.0, 2, 0}, {1, 1.0, 2, 1}};
  const std::vector<AgentId> winners = {0, 1};
  EXPECT_EQ(EnumerateOptimum(Without(bids, 0), 4).value - 1.0, 0.0);
  EXPECT_EQ(VcgPayment(bids, winners, 0, 4), 0.0);
  EXPECT_EQ(VcgPayment(bids, winners, 1, 4), 0.0);
}

TEST(VcgPayment, LoserIsAnError) {
  const auto bids = ThreeBids();
  EXPECT_THROW(VcgPayment(bids, std::vector<AgentId>{1, 2}, 0, 6),
               std::invalid_argument);
}

TEST(RunAuction, ThreeBidExampleOutcome) {
  const AuctionOutcome outcome = RunAuction(ThreeBids(), 6);
  EXPECT_EQ(outcome.winners, (std::vector<AgentId>{1, 2}));
  ASSERT_EQ(outcome.payments.size(), 2u);
  EXPECT_DOUBLE_EQ(outcome.payments.at(1), 1.0);
  EXPECT_DOUBLE_EQ(outcome.payments.at(2), 1.0);
  EXPECT_EQ(outcome.total_cost, 6);
  EXPECT_DOUBLE_EQ(outcome.total_value, 4.0);
  EXPECT_EQ(outcome.PaymentOf(0), 0.0);
  EXPECT_FALSE(outcome.IsWinner(0));
}

TEST(RunAuction, DegenerateInputs) {
  const AuctionOutcome empty = RunAuction({}, 10);
  EXPECT_TRUE(empty.winners.empty());
  EXPECT_TRUE(empty.payments.empty());
  EXPECT_EQ(empty.total_cost, 0);
  const std::vector<Bid> too_long = {{0, 1.0, 11, 0}};
  const AuctionOutcome filtered = RunAuction(too_long, 10);
  EXPECT_TRUE(filtered.winners.empty());
  EXPECT_EQ(filtered.total_cost, 0);
  EXPECT_THROW(RunAuction({}, -1), std::invalid_argument);
}

TEST(RunAuctionProperty, AccountingPaymentsAndFeasibility) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = static_cast<int>(rng() % 12) + 1;
    const Tokens b_max = static_cast<Tokens>(rng() % 61);
    const auto bids = trial % 2 == 0 ? RandomGridBids(rng, n, 30)
                                     : RandomRealBids(rng, n, 30);
    const AuctionOutcome outcome = RunAuction(bids, b_max);
    Tokens cost = 0;
    double value = 0.0;
    for (const Bid& b : bids) {
      if (outcome.IsWinner(b.agent_id)) {
        cost += b.message_len;
        value += b.bid_value;
        const double p = outcome.PaymentOf(b.agent_id);
        EXPECT_GE(p, -1e-9);
        EXPECT_LE(p, b.bid_value + 1e-9);
      } else {
        EXPECT_EQ(outcome.payments.count(b.agent_id), 0u);
        EXPECT_EQ(outcome.PaymentOf(b.agent_id), 0.0);
      }
    }
    EXPECT_EQ(outcome.total_cost, cost);
    EXPECT_LE(cost, b_max);
    EXPECT_NEAR(outcome.total_value, value, 1e-12);
  }
}

TEST(RunAuctionProperty, LargerBudgetNeverLowersValue) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const auto bids = RandomRealBids(rng, 10, 20);
    double previous = 0.0;
    for (Tokens b_max = 0; b_max <= 60; b_max += 3) {
      const double value = SetValue(bids, SolveWdp(bids, b_max));
      EXPECT_GE(value, previous);
      previous = value;
    }
  }
}

TEST(RunAuctionProperty, TruthfulBiddingIsDominant) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> scale(0.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = static_cast<int>(rng() % 8) + 2;
    const Tokens b_max = static_cast<Tokens>(rng() % 40) + 1;
    const auto bids = RandomRealBids(rng, n, 20);
    const std::size_t who = rng() % bids.size();
    const Bid truth = bids[who];
    const AuctionOutcome honest = RunAuction(bids, b_max);
    const double honest_utility =
        honest.IsWinner(truth.agent_id)
            ? truth.bid_value - honest.PaymentOf(truth.agent_id)
            : 0.0;
    for (int d = 0; d < 10; ++d) {
      auto lied = bids;
      lied[who].bid_value = scale(rng) * (d % 2 == 0 ? 1.0 : truth.bid_value);
      const AuctionOutcome outcome = RunAuction(lied, b_max);
      const double utility =
          outcome.IsWinner(truth.agent_id)
              ? truth.bid_value - outcome.PaymentOf(truth.agent_id)
              : 0.0;
      EXPECT_GE(honest_utility, utility - 1e-9);
    }
  }
}

TEST(RunAuctionProperty, Deterministic) {
  std::mt19937_64 rng(31);
  const auto bids = RandomRealBids(rng, 12, 25);
  EXPECT_EQ(RunAuction(bids, 40), RunAuction(bids, 40));
}

TEST(RunAuction, TieEpsilonTreatsNearEqualValuesAsTied) {
  // 1.0 vs 1.0 + 1e-12: with a tolerance the shorter set wins.
  const std::vector<Bid> bids = {{0, 1.0 + 1e-12, 4, 0}, {1, 1.0, 2, 1}};
  EXPECT_EQ(SolveWdp(bids, 4), (std::vector<AgentId>{0}));
  EXPECT_EQ(SolveWdp(bids, 4, WdpOptions{1e-9}), (std::vector<AgentId>{1}));
  EXPECT_EQ(BruteForceWdp(bids, 4, WdpOptions{1e-9}), (std::vector<AgentId>{1}));
}

}  // namespace
}  // namespace dala
