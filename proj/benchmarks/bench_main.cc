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


#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "dala/config.h"
#include "dala/market.h"
#include "dala/simulation.h"
#include "dala/valuation.h"

namespace dala {
namespace {

std::vector<Bid> RandomBids(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(0.0, 3.0);
  std::uniform_int_distribution<Tokens> length(1, 30);
  std::vector<Bid> bids;
  for (int j = 0; j < n; ++j) {
    bids.push_back({static_cast<AgentId>(j), value(rng), length(rng)});
  }
  return bids;
}

void BM_SolveWdp(benchmark::State& state) {
  const std::vector<Bid> bids = RandomBids(static_cast<int>(state.range(0)), 1);
  const Tokens b_max = state.range(1);
  for (auto _ : state) benchmark::DoNotOptimize(SolveWdp(bids, b_max));
}
BENCHMARK(BM_SolveWdp)->ArgsProduct({{4, 8, 12}, {24, 60}});

void BM_RunAuction(benchmark::State& state) {
  const std::vector<Bid> bids = RandomBids(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(RunAuction(bids, 60));
}
BENCHMARK(BM_RunAuction)->Arg(4)->Arg(12);

void BM_ValueNetPredict(benchmark::State& state) {
  const RunConfig config;
  const Team team(config);
  const AgentModels models = team.Init(3);
  const std::vector<double> message(MessageDim(config.env), 0.5);
  const std::vector<double> observation(ObservationDim(config.env), 0.25);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        team.value_net().Predict(models.value_nets[0], message, observation));
  }
}
BENCHMARK(BM_ValueNetPredict);

void BM_Episode(benchmark::State& state) {
  const RunConfig config;
  const Team team(config);
  const AgentModels models = team.Init(4);
  std::uint64_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunEpisode(team, models, EpisodeSpec{k, k + 1, 0, k}));
    ++k;
  }
}
BENCHMARK(BM_Episode);

}  // namespace
}  // namespace dala

BENCHMARK_MAIN();
