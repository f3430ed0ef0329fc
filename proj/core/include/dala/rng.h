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

#ifndef DALA_RNG_H_
#define DALA_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dala {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seed for a named sub-stream, e.g. DeriveSeed(run_seed, {epoch, episode}).
constexpr std::uint64_t DeriveSeed(std::uint64_t base,
                                   std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = MixSeed(base);
  for (std::uint64_t p : path) s = MixSeed(s ^ MixSeed(p + 0x632BE59BD9B4E019ull));
  return s;
}

}  // namespace dala

#endif  // DALA_RNG_H_
