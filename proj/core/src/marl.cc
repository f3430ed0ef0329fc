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

#include "dala/marl.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dala {
namespace {

std::vector<double> MaskedSoftmax(std::span<const double> logits,
                                  const std::vector<bool>& mask) {
  if (mask.size() != logits.size()) {
    throw std::invalid_argument("action mask does not match the action count");
  }
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < logits.size(); ++k) {
    if (mask[k]) top = std::max(top, logits[k]);
  }
  if (!std::isfinite(top)) {
    throw std::invalid_argument("action mask allows no action");
  }
  std::vector<double> probs(logits.size(), 0.0);
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    if (!mask[k]) continue;
    probs[k] = std::exp(logits[k] - top);
    sum += probs[k];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

}  // namespace

double Reward(double task_delta, double payment, bool is_winner, double alpha,
              double beta) {
  return alpha * task_delta - (is_winner ? beta * payment : 0.0);
}

double PolicyRatio(double log_prob_new, double log_prob_old) {
  return std::exp(
      std::clamp(log_prob_new - log_prob_old, -kMaxLogRatio, kMaxLogRatio));
}

double ClippedPolicyLoss(double ratio, double advantage, double epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

double ClippedPolicyLossGradient(double ratio, double advantage,
                                 double epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  // The unclipped branch is active whenever it is the (weakly) smaller one.
  return ratio * advantage <= clipped * advantage ? advantage : 0.0;
}

double ValueFnLoss(double v_new, double v_old, double return_target,
                   double epsilon_vf) {
  const double clipped =
      std::clamp(v_new, v_old - epsilon_vf, v_old + epsilon_vf);
  const double plain = (v_new - return_target) * (v_new - return_target);
  const double held = (clipped - return_target) * (clipped - return_target);
  return std::max(plain, held);
}

double ValueFnLossGradient(double v_new, double v_old, double return_target,
                           double epsilon_vf) {
  const double lo = v_old - epsilon_vf;
  const double hi = v_old + epsilon_vf;
  const double clipped = std::clamp(v_new, lo, hi);
  const double plain = (v_new - return_target) * (v_new - return_target);
  const double held = (clipped - return_target) * (clipped - return_target);
  if (plain >= held) return 2.0 * (v_new - return_target);
  return (v_new > lo && v_new < hi) ? 2.0 * (clipped - return_target) : 0.0;
}

double MappoObjective(double policy_loss, double value_loss, double entropy,
                      double c1, double c2) {
  return policy_loss - c1 * value_loss + c2 * entropy;
}

Advantages ComputeAdvantages(std::span<const Transition> trajectory,
                             double gamma, double lambda) {
  if (trajectory.empty()) {
    throw std::invalid_argument("cannot compute advantages of an empty trajectory");
  }
  if (gamma < 0.0 || gamma > 1.0 || lambda < 0.0 || lambda > 1.0) {
    throw std::invalid_argument("gamma and lambda must lie in [0, 1]");
  }
  const std::size_t n = trajectory.size();
  Advantages out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_advantage = 0.0;
  double next_value = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const Transition& step = trajectory[t];
    const double continues = step.done ? 0.0 : 1.0;
    const double td = step.reward + gamma * next_value * continues -
                      step.value_estimate;
    next_advantage = td + gamma * lambda * continues * next_advantage;
    out.advantages[t] = next_advantage;
    out.returns[t] = next_advantage + step.value_estimate;
    next_value = step.value_estimate;
  }
  return out;
}

void NormalizeAdvantages(std::span<double> advantages) {
  if (advantages.empty()) return;
  double mean = 0.0;
  for (double a : advantages) mean += a;
  mean /= static_cast<double>(advantages.size());
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  const double std = std::sqrt(var / static_cast<double>(advantages.size()));
  for (double& a : advantages) a = (a - mean) / (std + 1e-8);
}

double Entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

PolicyNet::PolicyNet(std::size_t observation_dim, std::size_t num_actions,
                     std::size_t hidden)
    : mlp_({observation_dim, hidden, num_actions}, false) {}

std::vector<double> PolicyNet::Init(Rng& rng) const {
  return mlp_.InitParams(rng, 0.01);
}

std::vector<double> PolicyNet::Probabilities(
    std::span<const double> params, std::span<const double> observation,
    const std::vector<bool>& mask) const {
  return MaskedSoftmax(mlp_.Forward(params, observation), mask);
}

std::vector<double> PolicyNet::Backprop(std::span<const double> params,
                                        std::span<const double> observation,
                                        const std::vector<bool>& mask,
                                        std::size_t action,
                                        double log_prob_weight,
                                        double entropy_weight,
                                        std::span<double> grad) const {
  Mlp::Tape tape;
  const std::vector<double> logits = mlp_.Forward(params, observation, &tape);
  const std::vector<double> probs = MaskedSoftmax(logits, mask);
  if (action >= probs.size() || !mask[action]) {
    throw std::invalid_argument("action is masked out");
  }
  const double entropy = Entropy(probs);
  std::vector<double> d_logits(probs.size(), 0.0);
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (!mask[k] || probs[k] <= 0.0) continue;
    const double indicator = k == action ? 1.0 : 0.0;
    d_logits[k] = log_prob_weight * (indicator - probs[k]) -
                  entropy_weight * probs[k] * (std::log(probs[k]) + entropy);
  }
  mlp_.Backward(params, tape, d_logits, grad);
  return probs;
}

}  // namespace dala
