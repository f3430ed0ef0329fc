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

#ifndef DALA_MARKET_H_
#define DALA_MARKET_H_

// Budget-constrained combinatorial auction for broadcast slots.
//
// Each agent submits at most one sealed bid per round: a value density and
// the token length of its message. The auctioneer drops bids that cannot
// fit the round cap, solves the 0/1 knapsack winner determination problem
// exactly, and charges every winner its VCG externality. Payments never
// touch the token budget; they only enter the reward signal.

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "dala/types.h"

namespace dala {

struct Bid {
  AgentId agent_id = 0;
  double bid_value = 0.0;   // value density, >= 0
  Tokens message_len = 1;   // >= 1
  std::size_t message_ref = 0;
};

struct AuctionOutcome {
  std::vector<AgentId> winners;          // ascending agent ids
  std::map<AgentId, double> payments;    // one entry per winner
  Tokens total_cost = 0;
  double total_value = 0.0;

  bool IsWinner(AgentId agent) const;
  // Zero for any agent outside the winner set.
  double PaymentOf(AgentId agent) const;

  friend bool operator==(const AuctionOutcome&, const AuctionOutcome&) = default;
};

struct WdpOptions {
  // Two subsets whose values differ by at most this much are treated as
  // value-tied, and the shorter one wins. Zero means exact comparison.
  double tie_epsilon = 0.0;
};

// Throws std::invalid_argument on a negative or non-finite bid value, a
// message_len below 1, or a repeated agent id.
void ValidateBids(std::span<const Bid> bids);

// Bids whose message fits within b_max, in input order.
std::vector<Bid> FilterValidBids(std::span<const Bid> bids, Tokens b_max);

// Exact knapsack over integer token lengths. Returns the ascending agent ids
// of the subset maximizing total bid value with total length <= b_max.
// Among value-optimal subsets the one with smaller total length wins, then
// the lexicographically smallest sorted id tuple. Bids longer than b_max are
// ignored.
std::vector<AgentId> SolveWdp(std::span<const Bid> bids, Tokens b_max,
                              const WdpOptions& options = {});

// Exhaustive subset enumeration with the same ordering as SolveWdp.
// Intended as a test oracle; throws std::invalid_argument above 20 bids.
std::vector<AgentId> BruteForceWdp(std::span<const Bid> bids, Tokens b_max,
                                   const WdpOptions& options = {});

inline constexpr std::size_t kBruteForceMaxBids = 20;

// Sum of bid values over `agents`, accumulated from the highest id down so
// that it matches the knapsack table bit for bit.
double SetValue(std::span<const Bid> bids, std::span<const AgentId> agents);

// V(W^-j) - V(W \ {j}): what the other bidders lose because j is present.
// `winners` must be SolveWdp(bids, b_max); throws std::invalid_argument if
// j is not among them. The result lies in [0, bid_value of j].
double VcgPayment(std::span<const Bid> bids, std::span<const AgentId> winners,
                  AgentId j, Tokens b_max, const WdpOptions& options = {});

// Filter, winner determination, one payment per winner, cost accounting.
AuctionOutcome RunAuction(std::span<const Bid> bids, Tokens b_max,
                          const WdpOptions& options = {});

}  // namespace dala

#endif  // DALA_MARKET_H_
