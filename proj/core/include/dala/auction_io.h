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

#ifndef DALA_AUCTION_IO_H_
#define DALA_AUCTION_IO_H_

#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "dala/market.h"

namespace dala {

class AuctionFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// {"b_max": 6, "bids": [{"agent_id": 0, "bid_value": 3.0, "message_len": 4}]}
struct AuctionInstance {
  std::vector<Bid> bids;
  Tokens b_max = 0;
};

AuctionInstance ParseAuctionInstance(const nlohmann::json& document);
nlohmann::json ToJson(const AuctionInstance& instance);

// {"winners": [...], "payments": {"<agent_id>": p}, "total_cost": c,
//  "total_value": v}
nlohmann::json ToJson(const AuctionOutcome& outcome);
AuctionOutcome ParseAuctionOutcome(const nlohmann::json& document);

}  // namespace dala

#endif  // DALA_AUCTION_IO_H_
