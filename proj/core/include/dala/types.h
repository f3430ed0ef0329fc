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

#ifndef DALA_TYPES_H_
#define DALA_TYPES_H_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace dala {

using AgentId = std::uint32_t;
using ShardId = std::uint32_t;
// Token counts. Message lengths, budgets and caps are all integral.
using Tokens = std::int64_t;

// Verbosity levels, ordered from most to least verbose.
enum class Tier : std::uint8_t { kFull = 0, kSummary = 1, kKeywords = 2, kSilence = 3 };

inline constexpr std::size_t kNumTiers = 4;
inline constexpr Tier kAllTiers[kNumTiers] = {Tier::kFull, Tier::kSummary,
                                              Tier::kKeywords, Tier::kSilence};

std::string_view TierName(Tier tier);
// Parses "Full", "Summary", "Keywords" or "Silence". Throws on anything else.
Tier ParseTier(std::string_view name);

// One step down the verbosity ladder. Silence is a fixed point.
constexpr Tier NextLowerTier(Tier tier) {
  return tier == Tier::kSilence ? Tier::kSilence
                                : static_cast<Tier>(static_cast<int>(tier) + 1);
}

// Per-shard token cost of each tier. Silence always costs zero.
struct TierLengths {
  Tokens full = 8;
  Tokens summary = 4;
  Tokens keywords = 2;

  Tokens PerShard(Tier tier) const;
  // Throws std::invalid_argument unless full > summary > keywords > 0.
  void Validate() const;
};

// A message an agent may broadcast: a non-empty set of its own shards
// rendered at some tier.
struct CandidateMessage {
  std::vector<ShardId> shard_ids;  // ascending
  Tier tier = Tier::kFull;
  Tokens token_len = 0;

  friend bool operator==(const CandidateMessage&,
                         const CandidateMessage&) = default;
};

// Builds a message for `shard_ids` at `tier`, with token_len derived from
// the tier table.
CandidateMessage MakeMessage(std::vector<ShardId> shard_ids, Tier tier,
                             const TierLengths& lengths);

}  // namespace dala

#endif  // DALA_TYPES_H_
