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

#ifndef DALA_TELEMETRY_H_
#define DALA_TELEMETRY_H_

// Per-round market records and the aggregates computed from them: strategy
// distributions, value-gap learning curves and token accounting. Records are
// streamed as one JSON object per line.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dala/types.h"
#include "dala/valuation.h"

namespace dala {

struct AgentDecision {
  AgentId agent_id = 0;
  bool had_candidates = false;  // held at least one unrevealed shard
  bool proposed = false;
  std::vector<ShardId> shard_ids;
  bool critical = false;  // candidate holds at least one critical shard
  std::optional<DensityReport> density;
  Tier tier = Tier::kSilence;  // submitted tier, after any downgrade
  double bid = 0.0;
  bool won = false;
  double payment = 0.0;
  Tokens message_len = 0;  // submitted length; 0 when silent

  friend bool operator==(const AgentDecision&, const AgentDecision&) = default;
};

struct RoundRecord {
  int epoch = 0;
  std::uint64_t episode_id = 0;
  int round = 0;  // 1-based
  std::vector<AgentDecision> agents;  // one per agent, ascending id
  Tokens effective_cap = 0;
  Tokens total_cost = 0;
  double task_delta = 0.0;
  double progress = 0.0;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

void to_json(nlohmann::json& j, const RoundRecord& record);
void from_json(const nlohmann::json& j, RoundRecord& record);
std::string ToJsonLine(const RoundRecord& record);

enum class StrategyBasis {
  kBroadcast,  // what was actually said: the tier if won, else Silence
  kSubmitted,  // the tier each agent put up for auction
};

struct StrategyDistribution {
  std::array<double, kNumTiers> fractions{};  // indexed by Tier
  std::size_t decisions = 0;

  double Of(Tier tier) const { return fractions[static_cast<std::size_t>(tier)]; }
};

// Fractions of agent-round decisions per tier. Throws std::invalid_argument
// on an empty stream.
StrategyDistribution ComputeStrategyDistribution(
    std::span<const RoundRecord> records,
    StrategyBasis basis = StrategyBasis::kBroadcast);

struct ValueGapPoint {
  int epoch = 0;
  double mean_critical = 0.0;
  double mean_noncritical = 0.0;
  double gap = 0.0;
  std::size_t critical_count = 0;
  std::size_t noncritical_count = 0;
};

// Per epoch, the mean predicted raw value over proposed candidates holding a
// critical shard versus those holding none. An empty group has mean 0.
std::vector<ValueGapPoint> ValueGapCurve(std::span<const RoundRecord> records);

struct TokenTotals {
  Tokens tokens_spent = 0;
  std::size_t episodes = 0;
  double per_episode_mean = 0.0;
  std::array<Tokens, kNumTiers> per_tier{};  // indexed by Tier
};

// Exact sums of winning message lengths.
TokenTotals TokenAccounting(std::span<const RoundRecord> records);

// Line-delimited writer. A non-empty config hash is stamped on every line.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path,
                       std::string config_hash = {});
  void Write(const RoundRecord& record);
  void Flush() { out_.flush(); }

 private:
  std::ofstream out_;
  std::string config_hash_;
};

std::vector<RoundRecord> ReadRoundRecords(const std::filesystem::path& path);

// Comma-separated table with a header row. Doubles are written with
// round-trip precision.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& Row();
  CsvTable& Add(const std::string& cell);
  CsvTable& Add(double value);
  CsvTable& Add(std::int64_t value);
  CsvTable& Add(std::uint64_t value);
  CsvTable& Add(int value) { return Add(static_cast<std::int64_t>(value)); }

  std::string ToString() const;
  void Write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string FormatDouble(double value);

}  // namespace dala

#endif  // DALA_TELEMETRY_H_
