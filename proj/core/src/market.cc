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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace dala {
namespace {

constexpr double kUnreachable = -std::numeric_limits<double>::infinity();

void CheckBudget(Tokens b_max) {
  if (b_max < 0) {
    throw std::invalid_argument("auction budget must be non-negative, got " +
                                std::to_string(b_max));
  }
}

// Bids that individually fit, sorted by agent id.
std::vector<Bid> FeasibleById(std::span<const Bid> bids, Tokens b_max) {
  std::vector<Bid> items;
  items.reserve(bids.size());
  for (const Bid& bid : bids) {
    if (bid.message_len <= b_max) items.push_back(bid);
  }
  std::sort(items.begin(), items.end(), [](const Bid& a, const Bid& b) {
    return a.agent_id < b.agent_id;
  });
  return items;
}

}  // namespace

bool AuctionOutcome::IsWinner(AgentId agent) const {
  return std::binary_search(winners.begin(), winners.end(), agent);
}

double AuctionOutcome::PaymentOf(AgentId agent) const {
  auto it = payments.find(agent);
  return it == payments.end() ? 0.0 : it->second;
}

void ValidateBids(std::span<const Bid> bids) {
  std::set<AgentId> seen;
  for (const Bid& bid : bids) {
    if (!std::isfinite(bid.bid_value) || bid.bid_value < 0.0) {
      throw std::invalid_argument("bid of agent " +
                                  std::to_string(bid.agent_id) +
                                  " has an invalid value");
    }
    if (bid.message_len < 1) {
      throw std::invalid_argument("bid of agent " +
                                  std::to_string(bid.agent_id) +
                                  " has message_len < 1");
    }
    if (!seen.insert(bid.agent_id).second) {
      throw std::invalid_argument("agent " + std::to_string(bid.agent_id) +
                                  " submitted more than one bid");
    }
  }
}

std::vector<Bid> FilterValidBids(std::span<const Bid> bids, Tokens b_max) {
  CheckBudget(b_max);
  std::vector<Bid> valid;
  std::copy_if(bids.begin(), bids.end(), std::back_inserter(valid),
               [b_max](const Bid& bid) { return bid.message_len <= b_max; });
  return valid;
}

double SetValue(std::span<const Bid> bids, std::span<const AgentId> agents) {
  std::vector<AgentId> order(agents.begin(), agents.end());
  std::sort(order.begin(), order.end(), std::greater<>());
  double total = 0.0;
  for (AgentId agent : order) {
    auto it = std::find_if(bids.begin(), bids.end(), [agent](const Bid& b) {
      return b.agent_id == agent;
    });
    if (it == bids.end()) {
      throw std::invalid_argument("agent " + std::to_string(agent) +
                                  " has no bid");
    }
    total = it->bid_value + total;
  }
  return total;
}

std::vector<AgentId> SolveWdp(std::span<const Bid> bids, Tokens b_max,
                              const WdpOptions& options) {
  CheckBudget(b_max);
  ValidateBids(bids);
  const std::vector<Bid> items = FeasibleById(bids, b_max);
  const std::size_t n = items.size();
  if (n == 0 || b_max == 0) return {};

  Tokens length_sum = 0;
  for (const Bid& item : items) length_sum += item.message_len;
  const auto width = static_cast<std::size_t>(std::min(b_max, length_sum)) + 1;

  // best[i][w]: max value of a subset of items[i..n) with total length
  // exactly w. Suffix order makes the forward reconstruction below pick the
  // smallest agent id whenever that keeps the optimum reachable.
  std::vector<double> best((n + 1) * width, kUnreachable);
  auto cell = [&](std::size_t i, std::size_t w) -> double& {
    return best[i * width + w];
  };
  cell(n, 0) = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const auto len = static_cast<std::size_t>(items[i].message_len);
    for (std::size_t w = 0; w < width; ++w) {
      double value = cell(i + 1, w);
      if (len <= w && cell(i + 1, w - len) != kUnreachable) {
        value = std::max(value, items[i].bid_value + cell(i + 1, w - len));
      }
      cell(i, w) = value;
    }
  }

  double top = kUnreachable;
  for (std::size_t w = 0; w < width; ++w) top = std::max(top, cell(0, w));
  std::size_t w = 0;
  while (cell(0, w) == kUnreachable || cell(0, w) < top - options.tie_epsilon) {
    ++w;
  }

  std::vector<AgentId> chosen;
  for (std::size_t i = 0; i < n && w > 0; ++i) {
    const auto len = static_cast<std::size_t>(items[i].message_len);
    if (len <= w && cell(i + 1, w - len) != kUnreachable &&
        items[i].bid_value + cell(i + 1, w - len) == cell(i, w)) {
      chosen.push_back(items[i].agent_id);
      w -= len;
    }
  }
  return chosen;
}

std::vector<AgentId> BruteForceWdp(std::span<const Bid> bids, Tokens b_max,
                                   const WdpOptions& options) {
  CheckBudget(b_max);
  ValidateBids(bids);
  if (bids.size() > kBruteForceMaxBids) {
    throw std::invalid_argument("brute force WDP is limited to " +
                                std::to_string(kBruteForceMaxBids) + " bids");
  }
  const std::vector<Bid> items = FeasibleById(bids, b_max);
  const std::size_t n = items.size();

  struct Subset {
    std::vector<AgentId> ids;  // ascending
    Tokens length = 0;
    double value = 0.0;
  };
  std::vector<Subset> feasible;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    Subset s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        s.ids.push_back(items[i].agent_id);
        s.length += items[i].message_len;
      }
    }
    if (s.length > b_max) continue;
    for (std::size_t k = s.ids.size(); k-- > 0;) {
      auto it = std::find_if(items.begin(), items.end(), [&](const Bid& b) {
        return b.agent_id == s.ids[k];
      });
      s.value = it->bid_value + s.value;
    }
    feasible.push_back(std::move(s));
  }

  double top = kUnreachable;
  for (const Subset& s : feasible) top = std::max(top, s.value);
  Tokens shortest = std::numeric_limits<Tokens>::max();
  for (const Subset& s : feasible) {
    if (s.value >= top - options.tie_epsilon) {
      shortest = std::min(shortest, s.length);
    }
  }
  double top_at_length = kUnreachable;
  for (const Subset& s : feasible) {
    if (s.length == shortest) top_at_length = std::max(top_at_length, s.value);
  }
  const Subset* pick = nullptr;
  for (const Subset& s : feasible) {
    if (s.length != shortest || s.value != top_at_length) continue;
    if (pick == nullptr || std::lexicographical_compare(
                               s.ids.begin(), s.ids.end(), pick->ids.begin(),
                               pick->ids.end())) {
      pick = &s;
    }
  }
  return pick == nullptr ? std::vector<AgentId>{} : pick->ids;
}

double VcgPayment(std::span<const Bid> bids, std::span<const AgentId> winners,
                  AgentId j, Tokens b_max, const WdpOptions& options) {
  if (std::find(winners.begin(), winners.end(), j) == winners.end()) {
    throw std::invalid_argument("agent " + std::to_string(j) +
                                " is not a winner; losers pay nothing");
  }
  std::vector<Bid> without_j;
  double own_value = 0.0;
  for (const Bid& bid : bids) {
    if (bid.agent_id == j) {
      own_value = bid.bid_value;
    } else {
      without_j.push_back(bid);
    }
  }
  const std::vector<AgentId> counterfactual =
      SolveWdp(without_j, b_max, options);
  const double value_without_j = SetValue(without_j, counterfactual);
  const double others_with_j = SetValue(bids, winners) - own_value;
  // Clamp away floating-point residue; the exact quantity is in range.
  return std::clamp(value_without_j - others_with_j, 0.0, own_value);
}

AuctionOutcome RunAuction(std::span<const Bid> bids, Tokens b_max,
                          const WdpOptions& options) {
  const std::vector<Bid> valid = FilterValidBids(bids, b_max);
  AuctionOutcome outcome;
  outcome.winners = SolveWdp(valid, b_max, options);
  for (AgentId j : outcome.winners) {
    outcome.payments[j] = VcgPayment(valid, outcome.winners, j, b_max, options);
  }
  for (const Bid& bid : valid) {
    if (outcome.IsWinner(bid.agent_id)) outcome.total_cost += bid.message_len;
  }
  outcome.total_value = SetValue(valid, outcome.winners);
  return outcome;
}

}  // namespace dala
