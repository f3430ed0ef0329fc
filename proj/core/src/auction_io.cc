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

#include "dala/auction_io.h"

#include <cstdint>
#include <set>
#include <string>
#include <type_traits>

namespace dala {
namespace {

void RequireKeys(const nlohmann::json& object, const std::set<std::string>& keys,
                 const std::string& where) {
  if (!object.is_object()) {
    throw AuctionFormatError(where + " must be an object");
  }
  for (const auto& key : keys) {
    if (!object.contains(key)) {
      throw AuctionFormatError(where + " is missing \"" + key + "\"");
    }
  }
  for (const auto& item : object.items()) {
    if (!keys.contains(item.key())) {
      throw AuctionFormatError(where + " has unknown key \"" + item.key() +
                               "\"");
    }
  }
}

template <typename T>
T Field(const nlohmann::json& object, const char* key, const std::string& where) {
  const nlohmann::json& value = object.at(key);
  if constexpr (std::is_floating_point_v<T>) {
    if (!value.is_number()) {
      throw AuctionFormatError(where + "." + key + " must be a number");
    }
  } else {
    if (!value.is_number_integer()) {
      throw AuctionFormatError(where + "." + key + " must be an integer");
    }
    if (value.is_number_integer() && !value.is_number_unsigned() &&
        value.get<std::int64_t>() < 0 && std::is_unsigned_v<T>) {
      throw AuctionFormatError(where + "." + key + " must be non-negative");
    }
  }
  return value.get<T>();
}

}  // namespace

AuctionInstance ParseAuctionInstance(const nlohmann::json& document) {
  RequireKeys(document, {"b_max", "bids"}, "instance");
  AuctionInstance instance;
  instance.b_max = Field<Tokens>(document, "b_max", "instance");
  if (instance.b_max < 0) {
    throw AuctionFormatError("instance.b_max must be non-negative");
  }
  const nlohmann::json& bids = document.at("bids");
  if (!bids.is_array()) throw AuctionFormatError("instance.bids must be a list");
  for (std::size_t k = 0; k < bids.size(); ++k) {
    const std::string where = "bids[" + std::to_string(k) + "]";
    RequireKeys(bids[k], {"agent_id", "bid_value", "message_len"}, where);
    Bid bid;
    bid.agent_id = Field<AgentId>(bids[k], "agent_id", where);
    bid.bid_value = Field<double>(bids[k], "bid_value", where);
    bid.message_len = Field<Tokens>(bids[k], "message_len", where);
    bid.message_ref = k;
    instance.bids.push_back(bid);
  }
  try {
    ValidateBids(instance.bids);
  } catch (const std::invalid_argument& e) {
    throw AuctionFormatError(e.what());
  }
  return instance;
}

nlohmann::json ToJson(const AuctionInstance& instance) {
  nlohmann::json bids = nlohmann::json::array();
  for (const Bid& b : instance.bids) {
    bids.push_back({{"agent_id", b.agent_id},
                    {"bid_value", b.bid_value},
                    {"message_len", b.message_len}});
  }
  return {{"b_max", instance.b_max}, {"bids", std::move(bids)}};
}

nlohmann::json ToJson(const AuctionOutcome& outcome) {
  nlohmann::json payments = nlohmann::json::object();
  for (const auto& [agent, payment] : outcome.payments) {
    payments[std::to_string(agent)] = payment;
  }
  return {{"winners", outcome.winners},
          {"payments", std::move(payments)},
          {"total_cost", outcome.total_cost},
          {"total_value", outcome.total_value}};
}

AuctionOutcome ParseAuctionOutcome(const nlohmann::json& document) {
  RequireKeys(document, {"winners", "payments", "total_cost", "total_value"},
              "outcome");
  AuctionOutcome outcome;
  try {
    outcome.winners = document.at("winners").get<std::vector<AgentId>>();
    for (const auto& item : document.at("payments").items()) {
      outcome.payments[static_cast<AgentId>(std::stoul(item.key()))] =
          item.value().get<double>();
    }
    outcome.total_cost = document.at("total_cost").get<Tokens>();
    outcome.total_value = document.at("total_value").get<double>();
  } catch (const std::exception& e) {
    throw AuctionFormatError(std::string("malformed outcome: ") + e.what());
  }
  return outcome;
}

}  // namespace dala
