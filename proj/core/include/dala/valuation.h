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

#ifndef DALA_VALUATION_H_
#define DALA_VALUATION_H_

// Message valuation: a message-conditioned value network, round-normalized
// value density, the bid rule and the verbosity tiers derived from density.

#include <cstddef>
#include <span>
#include <vector>

#include "dala/nn.h"
#include "dala/types.h"

namespace dala {

struct ValueNetShape {
  std::size_t message_dim = 0;
  std::size_t observation_dim = 0;
  std::size_t encoder_width = 32;
  std::size_t head_hidden = 32;
};

struct ValueNetParams {
  std::vector<double> message_encoder_weights;
  std::vector<double> observation_encoder_weights;
  std::vector<double> fusion_and_head_weights;

  std::size_t size() const;
  bool AllFinite() const;
  // Concatenation in field order; the inverse is ValueNet::Unflatten.
  std::vector<double> Flatten() const;

  friend bool operator==(const ValueNetParams&, const ValueNetParams&) = default;
};

// v = head(concat(tanh(message encoder), tanh(observation encoder))), with a
// tanh hidden layer in the head and a linear scalar output.
class ValueNet {
 public:
  explicit ValueNet(const ValueNetShape& shape);

  const ValueNetShape& shape() const { return shape_; }

  ValueNetParams Init(Rng& rng) const;
  ValueNetParams Zeros() const;
  ValueNetParams Unflatten(std::span<const double> flat) const;

  // Throws std::invalid_argument on wrong parameter or feature sizes.
  double Predict(const ValueNetParams& params, std::span<const double> message,
                 std::span<const double> observation) const;

  // Adds output_grad * dv/dparams into `grad` (which must have the same
  // layout as params) and returns v.
  double Backprop(const ValueNetParams& params, std::span<const double> message,
                  std::span<const double> observation, double output_grad,
                  ValueNetParams& grad) const;

  // State value: the head evaluated with a zero message embedding in place
  // of the message encoder output.
  double PredictState(const ValueNetParams& params,
                      std::span<const double> observation) const;
  double BackpropState(const ValueNetParams& params,
                       std::span<const double> observation, double output_grad,
                       ValueNetParams& grad) const;

 private:
  void CheckParams(const ValueNetParams& params) const;

  ValueNetShape shape_;
  Mlp message_encoder_;
  Mlp observation_encoder_;
  Mlp head_;
};

enum class SingleCandidateMode {
  kLiteral,         // z-score of a lone value is 0, so density is 0
  kScaledFallback,  // density = raw / (|raw_value_scale| * length)
};

struct DensityOptions {
  double epsilon = 1e-8;
  SingleCandidateMode single_candidate = SingleCandidateMode::kScaledFallback;
  double raw_value_scale = 1.0;
  // When false the 1/length factor is dropped and density is the z-score.
  bool divide_by_length = true;
};

struct DensityReport {
  double raw_value = 0.0;
  double z_score = 0.0;
  double density = 0.0;
  double round_mean = 0.0;
  double round_std = 0.0;  // population standard deviation
  Tokens length = 1;
  bool fallback = false;

  friend bool operator==(const DensityReport&, const DensityReport&) = default;
};

// z = (values[index] - mean) / (std + epsilon), density = z / length.
// Throws std::invalid_argument if values is empty, index is out of range or
// length < 1.
DensityReport ValueDensity(std::span<const double> values, std::size_t index,
                           Tokens length, const DensityOptions& options = {});

// max(0, density). Throws std::invalid_argument on a non-finite density.
double ComputeBid(double density);

// Fixed density thresholds used when a round has fewer than three positive
// densities. Full needs density >= full, Summary >= summary, Keywords
// > keywords.
struct TierThresholds {
  double full = 0.6;
  double summary = 0.3;
  double keywords = 0.0;

  void Validate() const;
};

// Silence for density <= 0. Otherwise the density's rank among the round's
// positive densities picks the tertile: top third Full, middle Summary,
// bottom Keywords. Non-positive entries of `round_densities` are ignored.
Tier AssignTier(double density, std::span<const double> round_densities,
                const TierThresholds& thresholds = {});

// Same shards, re-rendered at `tier`.
CandidateMessage RenderAtTier(const CandidateMessage& message, Tier tier,
                              const TierLengths& lengths);

// Steps the tier down until the message fits within b_max. Silence always
// fits, so this takes at most three steps.
CandidateMessage DowngradeToFit(const CandidateMessage& message, Tokens b_max,
                                const TierLengths& lengths);

// Squared error between the predicted value and the realized return.
double ValueLoss(double predicted, double realized_return);
// d ValueLoss / d predicted.
double ValueLossGradient(double predicted, double realized_return);

}  // namespace dala

#endif  // DALA_VALUATION_H_
