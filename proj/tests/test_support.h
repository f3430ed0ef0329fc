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

#ifndef DALA_TESTS_TEST_SUPPORT_H_
#define DALA_TESTS_TEST_SUPPORT_H_

// Reference implementations used as oracles. Written from the definitions,
// without calling into the library code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "dala/market.h"

namespace dala::testing {

// Bid values on a 1/8 grid so subset sums are exact and ties are common.
inline std::vector<Bid> RandomGridBids(std::mt19937_64& rng, int n,
                                       Tokens max_len, int max_eighths = 24) {
  std::uniform_int_distribution<int> eighths(0, max_eighths);
  std::uniform_int_distribution<Tokens> len(1, max_len);
  std::vector<Bid> bids;
  for (int i = 0; i < n; ++i) {
    bids.push_back(Bid{static_cast<AgentId>(i), eighths(rng) / 8.0, len(rng),
                       static_cast<std::size_t>(i)});
  }
  std::shuffle(bids.begin(), bids.end(), rng);
  return bids;
}

inline std::vector<Bid> RandomRealBids(std::mt19937_64& rng, int n,
                                       Tokens max_len) {
  std::uniform_real_distribution<double> value(0.0, 3.0);
  std::uniform_int_distribution<Tokens> len(1, max_len);
  std::vector<Bid> bids;
  for (int i = 0; i < n; ++i) {
    bids.push_back(Bid{static_cast<AgentId>(i), value(rng), len(rng),
                       static_cast<std::size_t>(i)});
  }
  std::shuffle(bids.begin(), bids.end(), rng);
  return bids;
}

struct EnumeratedOptimum {
  std::vector<AgentId> winners;  // ascending
  double value = 0.0;
  Tokens length = 0;
};

// Exhaustive search over every subset: highest value, then shortest total
// length, then the lexicographically smallest sorted id tuple. Exact for
// grid-valued bids.
inline EnumeratedOptimum EnumerateOptimum(std::span<const Bid> bids,
                                          Tokens b_max) {
  EnumeratedOptimum best;
  bool have = false;
  const std::size_t n = bids.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<AgentId> ids;
    double value = 0.0;
    Tokens length = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        ids.push_back(bids[i].agent_id);
        value += bids[i].bid_value;
        length += bids[i].message_len;
      }
    }
    if (length > b_max) continue;
    std::sort(ids.begin(), ids.end());
    const bool better =
        !have || value > best.value ||
        (value == best.value &&
         (length < best.length || (length == best.length && ids < best.winners)));
    if (better) {
      best = {ids, value, length};
      have = true;
    }
  }
  return best;
}

inline std::vector<Bid> Without(std::span<const Bid> bids, AgentId agent) {
  std::vector<Bid> out;
  for (const Bid& b : bids) {
    if (b.agent_id != agent) out.push_back(b);
  }
  return out;
}

// Central differences of a scalar function of a parameter vector.
inline std::vector<double> NumericGradient(
    const std::function<double(std::span<const double>)>& f,
    std::vector<double> x, double step = 1e-5) {
  std::vector<double> grad(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double saved = x[k];
    x[k] = saved + step;
    const double up = f(x);
    x[k] = saved - step;
    const double down = f(x);
    x[k] = saved;
    grad[k] = (up - down) / (2.0 * step);
  }
  return grad;
}

// ||a - n|| / (||a|| + ||n||), zero when both vanish.
inline double RelativeError(std::span<const double> analytic,
                            std::span<const double> numeric) {
  double diff = 0.0, a = 0.0, n = 0.0;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    diff += (analytic[k] - numeric[k]) * (analytic[k] - numeric[k]);
    a += analytic[k] * analytic[k];
    n += numeric[k] * numeric[k];
  }
  const double denom = std::sqrt(a) + std::sqrt(n);
  return denom == 0.0 ? 0.0 : std::sqrt(diff) / denom;
}

// Dense layer stack y = W x + b, tanh on hidden layers (and on the output
// when requested). Parameters are laid out layer by layer, row-major weights
// then biases.
inline std::vector<double> ReferenceMlp(std::span<const double> params,
                                        const std::vector<std::size_t>& widths,
                                        bool tanh_output,
                                        std::vector<double> x) {
  std::size_t offset = 0;
  for (std::size_t layer = 0; layer + 1 < widths.size(); ++layer) {
    const std::size_t in = widths[layer], out = widths[layer + 1];
    std::vector<double> y(out, 0.0);
    for (std::size_t r = 0; r < out; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < in; ++c) sum += params[offset + r * in + c] * x[c];
      y[r] = sum + params[offset + in * out + r];
    }
    offset += in * out + out;
    const bool last = layer + 2 == widths.size();
    if (!last || tanh_output) {
      for (double& v : y) v = std::tanh(v);
    }
    x = std::move(y);
  }
  return x;
}

}  // namespace dala::testing

#endif  // DALA_TESTS_TEST_SUPPORT_H_
