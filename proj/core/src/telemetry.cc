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

#include "dala/telemetry.h"

#include <charconv>
#include <map>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace dala {

void to_json(nlohmann::json& j, const RoundRecord& record) {
  nlohmann::json agents = nlohmann::json::array();
  for (const AgentDecision& a : record.agents) {
    nlohmann::json density = nullptr;
    if (a.density) {
      const DensityReport& d = *a.density;
      density = {{"raw_value", d.raw_value},   {"z_score", d.z_score},
                 {"density", d.density},       {"round_mean", d.round_mean},
                 {"round_std", d.round_std},   {"length", d.length},
                 {"fallback", d.fallback}};
    }
    agents.push_back({{"agent_id", a.agent_id},
                      {"had_candidates", a.had_candidates},
                      {"proposed", a.proposed},
                      {"shard_ids", a.shard_ids},
                      {"critical", a.critical},
                      {"density", std::move(density)},
                      {"tier", TierName(a.tier)},
                      {"bid", a.bid},
                      {"won", a.won},
                      {"payment", a.payment},
                      {"message_len", a.message_len}});
  }
  j = {{"epoch", record.epoch},
       {"episode_id", record.episode_id},
       {"round", record.round},
       {"agents", std::move(agents)},
       {"effective_cap", record.effective_cap},
       {"total_cost", record.total_cost},
       {"task_delta", record.task_delta},
       {"progress", record.progress}};
}

void from_json(const nlohmann::json& j, RoundRecord& record) {
  record.epoch = j.at("epoch").get<int>();
  record.episode_id = j.at("episode_id").get<std::uint64_t>();
  record.round = j.at("round").get<int>();
  record.effective_cap = j.at("effective_cap").get<Tokens>();
  record.total_cost = j.at("total_cost").get<Tokens>();
  record.task_delta = j.at("task_delta").get<double>();
  record.progress = j.at("progress").get<double>();
  record.agents.clear();
  for (const auto& a : j.at("agents")) {
    AgentDecision d;
    d.agent_id = a.at("agent_id").get<AgentId>();
    d.had_candidates = a.at("had_candidates").get<bool>();
    d.proposed = a.at("proposed").get<bool>();
    d.shard_ids = a.at("shard_ids").get<std::vector<ShardId>>();
    d.critical = a.at("critical").get<bool>();
    if (!a.at("density").is_null()) {
      const auto& r = a.at("density");
      d.density = DensityReport{r.at("raw_value").get<double>(),
                                r.at("z_score").get<double>(),
                                r.at("density").get<double>(),
                                r.at("round_mean").get<double>(),
                                r.at("round_std").get<double>(),
                                r.at("length").get<Tokens>(),
                                r.at("fallback").get<bool>()};
    }
    d.tier = ParseTier(a.at("tier").get<std::string>());
    d.bid = a.at("bid").get<double>();
    d.won = a.at("won").get<bool>();
    d.payment = a.at("payment").get<double>();
    d.message_len = a.at("message_len").get<Tokens>();
    record.agents.push_back(std::move(d));
  }
}

std::string ToJsonLine(const RoundRecord& record) {
  return nlohmann::json(record).dump();
}

StrategyDistribution ComputeStrategyDistribution(
    std::span<const RoundRecord> records, StrategyBasis basis) {
  std::array<std::size_t, kNumTiers> counts{};
  StrategyDistribution dist;
  for (const RoundRecord& record : records) {
    for (const AgentDecision& a : record.agents) {
      Tier tier = a.tier;
      if (basis == StrategyBasis::kBroadcast && !a.won) tier = Tier::kSilence;
      ++counts[static_cast<std::size_t>(tier)];
      ++dist.decisions;
    }
  }
  if (dist.decisions == 0) {
    throw std::invalid_argument("strategy distribution of an empty stream");
  }
  for (std::size_t k = 0; k < kNumTiers; ++k) {
    dist.fractions[k] =
        static_cast<double>(counts[k]) / static_cast<double>(dist.decisions);
  }
  return dist;
}

std::vector<ValueGapPoint> ValueGapCurve(std::span<const RoundRecord> records) {
  struct Sums {
    double critical = 0.0, noncritical = 0.0;
    std::size_t n_critical = 0, n_noncritical = 0;
  };
  std::map<int, Sums> by_epoch;
  for (const RoundRecord& record : records) {
    Sums& s = by_epoch[record.epoch];
    for (const AgentDecision& a : record.agents) {
      if (!a.proposed || !a.density) continue;
      if (a.critical) {
        s.critical += a.density->raw_value;
        ++s.n_critical;
      } else {
        s.noncritical += a.density->raw_value;
        ++s.n_noncritical;
      }
    }
  }
  std::vector<ValueGapPoint> curve;
  for (const auto& [epoch, s] : by_epoch) {
    ValueGapPoint p;
    p.epoch = epoch;
    p.critical_count = s.n_critical;
    p.noncritical_count = s.n_noncritical;
    if (s.n_critical > 0) p.mean_critical = s.critical / static_cast<double>(s.n_critical);
    if (s.n_noncritical > 0) {
      p.mean_noncritical = s.noncritical / static_cast<double>(s.n_noncritical);
    }
    p.gap = p.mean_critical - p.mean_noncritical;
    curve.push_back(p);
  }
  return curve;
}

TokenTotals TokenAccounting(std::span<const RoundRecord> records) {
  TokenTotals totals;
  std::set<std::pair<int, std::uint64_t>> episodes;
  for (const RoundRecord& record : records) {
    episodes.emplace(record.epoch, record.episode_id);
    for (const AgentDecision& a : record.agents) {
      if (!a.won) continue;
      totals.tokens_spent += a.message_len;
      totals.per_tier[static_cast<std::size_t>(a.tier)] += a.message_len;
    }
  }
  totals.episodes = episodes.size();
  if (totals.episodes > 0) {
    totals.per_episode_mean = static_cast<double>(totals.tokens_spent) /
                              static_cast<double>(totals.episodes);
  }
  return totals;
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path,
                         std::string config_hash)
    : out_(path, std::ios::out | std::ios::trunc | std::ios::binary),
      config_hash_(std::move(config_hash)) {
  if (!out_) throw std::runtime_error("cannot open " + path.string());
}

void JsonlWriter::Write(const RoundRecord& record) {
  nlohmann::json line = record;
  if (!config_hash_.empty()) line["config_hash"] = config_hash_;
  out_ << line.dump() << '\n';
}

std::vector<RoundRecord> ReadRoundRecords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<RoundRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(nlohmann::json::parse(line).get<RoundRecord>());
  }
  return records;
}

std::string FormatDouble(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw std::runtime_error("cannot format double");
  return std::string(buffer, end);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::Row() {
  rows_.emplace_back();
  return *this;
}

CsvTable& CsvTable::Add(const std::string& cell) {
  if (rows_.empty()) Row();
  rows_.back().push_back(cell);
  return *this;
}

CsvTable& CsvTable::Add(double value) { return Add(FormatDouble(value)); }
CsvTable& CsvTable::Add(std::int64_t value) { return Add(std::to_string(value)); }
CsvTable& CsvTable::Add(std::uint64_t value) { return Add(std::to_string(value)); }

std::string CsvTable::ToString() const {
  auto join = [](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k > 0) line += ',';
      line += cells[k];
    }
    return line + '\n';
  };
  std::string text = join(header_);
  for (const auto& row : rows_) {
    if (row.size() != header_.size()) {
      throw std::logic_error("csv row width does not match header");
    }
    text += join(row);
  }
  return text;
}

void CsvTable::Write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::out | std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << ToString();
}

}  // namespace dala
