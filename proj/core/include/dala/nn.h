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

#ifndef DALA_NN_H_
#define DALA_NN_H_

// Small fully connected networks over flat parameter vectors, with exact
// reverse-mode gradients. Parameters live outside the network object so a
// single shape can serve many agents and frozen snapshots.

#include <cstddef>
#include <span>
#include <vector>

#include "dala/rng.h"

namespace dala {

// Stack of dense layers. Hidden layers use tanh; the output layer is linear
// unless `tanh_output` is set. Layer l stores a row-major weight matrix
// [out x in] followed by its bias [out].
class Mlp {
 public:
  struct Tape {
    // activations[0] is the input, activations[l + 1] the output of layer l.
    std::vector<std::vector<double>> activations;
  };

  Mlp() = default;
  Mlp(std::vector<std::size_t> widths, bool tanh_output);

  std::size_t input_dim() const { return widths_.front(); }
  std::size_t output_dim() const { return widths_.back(); }
  std::size_t num_params() const { return num_params_; }
  const std::vector<std::size_t>& widths() const { return widths_; }
  bool tanh_output() const { return tanh_output_; }

  // Throws std::invalid_argument on dimension mismatch.
  std::vector<double> Forward(std::span<const double> params,
                              std::span<const double> input,
                              Tape* tape = nullptr) const;

  // Adds dLoss/dparams into `param_grad` and returns dLoss/dinput, given
  // dLoss/doutput and the tape of the matching Forward call.
  std::vector<double> Backward(std::span<const double> params,
                               const Tape& tape,
                               std::span<const double> output_grad,
                               std::span<double> param_grad) const;

  // Gaussian init with std 1/sqrt(fan_in); the last layer is further scaled
  // by `output_scale`. Biases start at zero.
  std::vector<double> InitParams(Rng& rng, double output_scale) const;

 private:
  std::vector<std::size_t> widths_{1, 1};
  bool tanh_output_ = false;
  std::size_t num_params_ = 2;
};

// Gradient ascent with heavy-ball momentum and global-norm clipping.
class MomentumAscent {
 public:
  MomentumAscent() = default;
  MomentumAscent(std::size_t num_params, double lr, double momentum,
                 double grad_clip);

  // params += lr * velocity, velocity = momentum * velocity + clip(direction).
  void Step(std::span<double> params, std::span<const double> direction);

  const std::vector<double>& velocity() const { return velocity_; }

 private:
  std::vector<double> velocity_;
  double lr_ = 0.0;
  double momentum_ = 0.0;
  double grad_clip_ = 0.0;
};

double L2Norm(std::span<const double> v);
bool AllFinite(std::span<const double> v);

}  // namespace dala

#endif  // DALA_NN_H_
