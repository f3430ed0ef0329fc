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

#include "dala/types.h"

#include <stdexcept>
#include <string>

namespace dala {

std::string_view TierName(Tier tier) {
  switch (tier) {
    case Tier::kFull:
      return "Full";
    case Tier::kSummary:
      return "Summary";
    case Tier::kKeywords:
      return "Keywords";
    case Tier::kSilence:
      return "Silence";
  }
  return "Silence";
}

Tier ParseTier(std::string_view name) {
  for (Tier tier : kAllTiers) {
    if (TierName(tier) == name) return tier;
  }
  throw std::invalid_argument("unknown tier '" + std::string(name) + "'");
}

Tokens TierLengths::PerShard(Tier tier) const {
  switch (tier) {
    case Tier::kFull:
      return full;
    case Tier::kSummary:
      return summary;
    case Tier::kKeywords:
      return keywords;
    case Tier::kSilence:
      return 0;
  }
  return 0;
}

void TierLengths::Validate() const {
  if (!(full > summary && summary > keywords && keywords > 0)) {
    throw std::invalid_argument(
        "tier lengths must satisfy full > summary > keywords > 0");
  }
}

CandidateMessage MakeMessage(std::vector<ShardId> shard_ids, Tier tier,
                             const TierLengths& lengths) {
  CandidateMessage message;
  message.token_len =
      lengths.PerShard(tier) * static_cast<Tokens>(shard_ids.size());
  message.shard_ids = std::move(shard_ids);
  message.tier = tier;
  return message;
}

}  // namespace dala
