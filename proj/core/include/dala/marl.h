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

#ifndef DALA_MARL_H_
#define DALA_MARL_H_

// Multi-agent PPO building blocks: the per-step reward, clipped surrogate
// and value losses with their derivatives, generalized advantage estimation
// and a masked categorical policy network.

#include <cstddef>
#include <span>
#include <vector>

#include "dala/nn.h"

namespace dala {

struct Transition {
  std::vector<double> observation;
  std::vector<double> global_state;
  std::vector<bool> action_mask;
  std::size_t action_index = 0;
  double log_prob_old = 0.0;
  double reward = 0.0;
  double value_estimate = 0.0;
  bool done = false;
  double payment = 0.0;
  bool is_winner = false;
  double task_delta = 0.0;
};

struct Advantages {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// alpha * task_delta - beta * payment, with the payment term only for
// winners.
double Reward(double task_delta, double payment, bool is_winner, double alpha,
              double beta);

inline constexpr double kMaxLogRatio = 20.0;

// exp(log_prob_new - log_prob_old), exponent clamped to +-kMaxLogRatio.
double PolicyRatio(double log_prob_new, double log_prob_old);

// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A).
double ClippedPolicyLoss(double ratio, double advantage, double epsilon);
// Derivative of ClippedPolicyLoss with respect to ratio.
double ClippedPolicyLossGradient(double ratio, double advantage, double epsilon);

// max((v - R)^2, (clip(v, v_old - eps, v_old + eps) - R)^2).
double ValueFnLoss(double v_new, double v_old, double return_target,
                   double epsilon_vf);
// Derivative of ValueFnLoss with respect to v_new.
double ValueFnLossGradient(double v_new, double v_old, double return_target,
                           double epsilon_vf);

// L_clip - c1 * L_vf + c2 * S; the quantity training maximizes.
double MappoObjective(double policy_loss, double value_loss, double entropy,
                      double c1, double c2);

// Backward GAE recursion. A done step does not bootstrap, and the step after
// the last transition is treated as terminal. Returns are A + V. Advantages
// are not normalized here; see NormalizeAdvantages. Throws
// std::invalid_argument on an empty trajectory or gamma/lambda outside [0, 1].
Advantages ComputeAdvantages(std::span<const Transition> trajectory,
                             double gamma, double lambda);

// In place: subtract the mean and divide by (population std + 1e-8).
void NormalizeAdvantages(std::span<double> advantages);

// Shannon entropy in nats of a categorical distribution.
double Entropy(std::span<const double> probs);

// Observation -> logits over action slots, with masked slots excluded from
// the softmax.
class PolicyNet {
 public:
  PolicyNet() = default;
  PolicyNet(std::size_t observation_dim, std::size_t num_actions,
            std::size_t hidden = 32);

  std::size_t num_params() const { return mlp_.num_params(); }
  std::size_t num_actions() const { return mlp_.output_dim(); }
  const Mlp& mlp() const { return mlp_; }

  std::vector<double> Init(Rng& rng) const;

  // Probabilities over all slots; masked slots get exactly zero. Throws
  // std::invalid_argument if no slot is allowed.
  std::vector<double> Probabilities(std::span<const double> params,
                                    std::span<const double> observation,
                                    const std::vector<bool>& mask) const;

  // Adds the gradient of
  //   log_prob_weight * log pi(action) + entropy_weight * S[pi]
  // into `grad` and returns the probabilities it used.
  std::vector<double> Backprop(std::span<const double> params,
                               std::span<const double> observation,
                               const std::vector<bool>& mask,
                               std::size_t action, double log_prob_weight,
                               double entropy_weight,
                               std::span<double> grad) const;

 private:
  Mlp mlp_;
};

}  // namespace dala

#endif  // DALA_MARL_H_
