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

#include "dala/valuation.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dala {
namespace {

// Small output layer so an untrained net scores every message near zero.
constexpr double kHeadInitScale = 0.01;

}  // namespace


std::size_t ValueNetParams::size() const {
  return message_encoder_weights.size() + observation_encoder_weights.size() +
         fusion_and_head_weights.size();
}

bool ValueNetParams::AllFinite() const {
  return dala::AllFinite(message_encoder_weights) &&
         dala::AllFinite(observation_encoder_weights) &&
         dala::AllFinite(fusion_and_head_weights);
}

std::vector<double> ValueNetParams::Flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  flat.insert(flat.end(), message_encoder_weights.begin(),
              message_encoder_weights.end());
  flat.insert(flat.end(), observation_encoder_weights.begin(),
              observation_encoder_weights.end());
  flat.insert(flat.end(), fusion_and_head_weights.begin(),
              fusion_and_head_weights.end());
  return flat;
}

ValueNet::ValueNet(const ValueNetShape& shape)
    : shape_(shape),
      message_encoder_({shape.message_dim, shape.encoder_width}, true),
      observation_encoder_({shape.observation_dim, shape.encoder_width}, true),
      head_({2 * shape.encoder_width, shape.head_hidden, 1}, false) {}

ValueNetParams ValueNet::Init(Rng& rng) const {
  return {message_encoder_.InitParams(rng, 1.0),
          observation_encoder_.InitParams(rng, 1.0),
          head_.InitParams(rng, kHeadInitScale)};
}

ValueNetParams ValueNet::Zeros() const {
  return {std::vector<double>(message_encoder_.num_params(), 0.0),
          std::vector<double>(observation_encoder_.num_params(), 0.0),
          std::vector<double>(head_.num_params(), 0.0)};
}

ValueNetParams ValueNet::Unflatten(std::span<const double> flat) const {
  const std::size_t m = message_encoder_.num_params();
  const std::size_t o = observation_encoder_.num_params();
  const std::size_t h = head_.num_params();
  if (flat.size() != m + o + h) {
    throw std::invalid_argument("value network expects " +
                                std::to_string(m + o + h) +
                                " parameters, got " +
                                std::to_string(flat.size()));
  }
  return {std::vector<double>(flat.begin(), flat.begin() + m),
          std::vector<double>(flat.begin() + m, flat.begin() + m + o),
          std::vector<double>(flat.begin() + m + o, flat.end())};
}

void ValueNet::CheckParams(const ValueNetParams& params) const {
  if (params.message_encoder_weights.size() != message_encoder_.num_params() ||
      params.observation_encoder_weights.size() !=
          observation_encoder_.num_params() ||
      params.fusion_and_head_weights.size() != head_.num_params()) {
    throw std::invalid_argument("value network parameters do not match shape");
  }
}

double ValueNet::Predict(const ValueNetParams& params,
                         std::span<const double> message,
                         std::span<const double> observation) const {
  CheckParams(params);
  std::vector<double> fused =
      message_encoder_.Forward(params.message_encoder_weights, message);
  const std::vector<double> obs =
      observation_encoder_.Forward(params.observation_encoder_weights,
                                   observation);
  fused.insert(fused.end(), obs.begin(), obs.end());
  return head_.Forward(params.fusion_and_head_weights, fused)[0];
}

double ValueNet::Backprop(const ValueNetParams& params,
                          std::span<const double> message,
                          std::span<const double> observation,
                          double output_grad, ValueNetParams& grad) const {
  CheckParams(params);
  CheckParams(grad);
  Mlp::Tape message_tape, obs_tape, head_tape;
  std::vector<double> fused = message_encoder_.Forward(
      params.message_encoder_weights, message, &message_tape);
  const std::vector<double> obs = observation_encoder_.Forward(
      params.observation_encoder_weights, observation, &obs_tape);
  fused.insert(fused.end(), obs.begin(), obs.end());
  const double value =
      head_.Forward(params.fusion_and_head_weights, fused, &head_tape)[0];

  const double seed[1] = {output_grad};
  const std::vector<double> d_fused = head_.Backward(
      params.fusion_and_head_weights, head_tape, seed,
      grad.fusion_and_head_weights);
  const std::size_t width = shape_.encoder_width;
  message_encoder_.Backward(params.message_encoder_weights, message_tape,
                            std::span(d_fused).first(width),
                            grad.message_encoder_weights);
  observation_encoder_.Backward(params.observation_encoder_weights, obs_tape,
                                std::span(d_fused).subspan(width),
                                grad.observation_encoder_weights);
  return value;
}

double ValueNet::PredictState(const ValueNetParams& params,
                              std::span<const double> observation) const {
  CheckParams(params);
  std::vector<double> fused(shape_.encoder_width, 0.0);
  const std::vector<double> obs = observation_encoder_.Forward(
      params.observation_encoder_weights, observation);
  fused.insert(fused.end(), obs.begin(), obs.end());
  return head_.Forward(params.fusion_and_head_weights, fused)[0];
}

double ValueNet::BackpropState(const ValueNetParams& params,
                               std::span<const double> observation,
                               double output_grad, ValueNetParams& grad) const {
  CheckParams(params);
  CheckParams(grad);
  Mlp::Tape obs_tape, head_tape;
  std::vector<double> fused(shape_.encoder_width, 0.0);
  const std::vector<double> obs = observation_encoder_.Forward(
      params.observation_encoder_weights, observation, &obs_tape);
  fused.insert(fused.end(), obs.begin(), obs.end());
  const double value =
      head_.Forward(params.fusion_and_head_weights, fused, &head_tape)[0];
  const double seed[1] = {output_grad};
  const std::vector<double> d_fused = head_.Backward(
      params.fusion_and_head_weights, head_tape, seed,
      grad.fusion_and_head_weights);
  observation_encoder_.Backward(
      params.observation_encoder_weights, obs_tape,
      std::span(d_fused).subspan(shape_.encoder_width),
      grad.observation_encoder_weights);
  return value;
}

DensityReport ValueDensity(std::span<const double> values, std::size_t index,
                           Tokens length, const DensityOptions& options) {
  if (values.empty()) {
    throw std::invalid_argument("value density needs at least one value");
  }
  if (index >= values.size()) {
    throw std::invalid_argument("candidate index out of range");
  }
  if (length < 1) throw std::invalid_argument("message length must be >= 1");

  DensityReport report;
  report.raw_value = values[index];
  report.length = length;
  double sum = 0.0;
  for (double v : values) sum += v;
  report.round_mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - report.round_mean) * (v - report.round_mean);
  report.round_std = std::sqrt(sq / static_cast<double>(values.size()));

  const double divisor =
      options.divide_by_length ? static_cast<double>(length) : 1.0;
  if (values.size() == 1 &&
      options.single_candidate == SingleCandidateMode::kScaledFallback) {
    report.fallback = true;
    report.z_score = 0.0;
    report.density =
        report.raw_value / (std::abs(options.raw_value_scale) * divisor);
    return report;
  }
  const double numerator = report.raw_value - report.round_mean;
  const double denominator = report.round_std + options.epsilon;
  report.z_score = denominator > 0.0 ? numerator / denominator : 0.0;
  report.density = report.z_score / divisor;
  return report;
}

double ComputeBid(double density) {
  if (!std::isfinite(density)) {
    throw std::invalid_argument("bid density must be finite");
  }
  return std::max(0.0, density);
}

void TierThresholds::Validate() const {
  if (!(full > summary && summary > keywords && keywords >= 0.0)) {
    throw std::invalid_argument(
        "tier thresholds must satisfy full > summary > keywords >= 0");
  }
}

Tier AssignTier(double density, std::span<const double> round_densities,
                const TierThresholds& thresholds) {
  if (!(density > 0.0)) return Tier::kSilence;
  std::size_t positives = 0;
  std::size_t below = 0;
  for (double d : round_densities) {
    if (!(d > 0.0)) continue;
    ++positives;
    if (d < density) ++below;
  }
  if (positives < 3) {
    if (density >= thresholds.full) return Tier::kFull;
    if (density >= thresholds.summary) return Tier::kSummary;
    if (density > thresholds.keywords) return Tier::kKeywords;
    return Tier::kSilence;
  }
  // Rank fraction below/positives compared against 1/3 and 2/3 in integers.
  if (3 * below >= 2 * positives) return Tier::kFull;
  if (3 * below >= positives) return Tier::kSummary;
  return Tier::kKeywords;
}

CandidateMessage RenderAtTier(const CandidateMessage& message, Tier tier,
                              const TierLengths& lengths) {
  return MakeMessage(message.shard_ids, tier, lengths);
}

CandidateMessage DowngradeToFit(const CandidateMessage& message, Tokens b_max,
                                const TierLengths& lengths) {
  CandidateMessage out = message;
  while (out.token_len > b_max && out.tier != Tier::kSilence) {
    out = RenderAtTier(out, NextLowerTier(out.tier), lengths);
  }
  return out;
}

double ValueLoss(double predicted, double realized_return) {
  const double diff = predicted - realized_return;
  return diff * diff;
}

double ValueLossGradient(double predicted, double realized_return) {
  return 2.0 * (predicted - realized_return);
}

}  // namespace dala
