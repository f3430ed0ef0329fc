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

#include "dala/nn.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dala {

Mlp::Mlp(std::vector<std::size_t> widths, bool tanh_output)
    : widths_(std::move(widths)), tanh_output_(tanh_output), num_params_(0) {
  if (widths_.size() < 2) {
    throw std::invalid_argument("an MLP needs at least input and output widths");
  }
  for (std::size_t w : widths_) {
    if (w == 0) throw std::invalid_argument("MLP layer widths must be positive");
  }
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    num_params_ += widths_[l + 1] * widths_[l] + widths_[l + 1];
  }
}

std::vector<double> Mlp::Forward(std::span<const double> params,
                                 std::span<const double> input,
                                 Tape* tape) const {
  if (params.size() != num_params_) {
    throw std::invalid_argument("MLP expects " + std::to_string(num_params_) +
                                " parameters, got " +
                                std::to_string(params.size()));
  }
  if (input.size() != input_dim()) {
    throw std::invalid_argument("MLP expects input of width " +
                                std::to_string(input_dim()) + ", got " +
                                std::to_string(input.size()));
  }
  std::vector<double> x(input.begin(), input.end());
  if (tape != nullptr) {
    tape->activations.clear();
    tape->activations.push_back(x);
  }
  std::size_t offset = 0;
  const std::size_t layers = widths_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = widths_[l];
    const std::size_t out = widths_[l + 1];
    const double* w = params.data() + offset;
    const double* b = w + out * in;
    std::vector<double> y(out);
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b[o];
      for (std::size_t i = 0; i < in; ++i) acc += w[o * in + i] * x[i];
      y[o] = (l + 1 < layers || tanh_output_) ? std::tanh(acc) : acc;
    }
    offset += out * in + out;
    x = std::move(y);
    if (tape != nullptr) tape->activations.push_back(x);
  }
  return x;
}

std::vector<double> Mlp::Backward(std::span<const double> params,
                                  const Tape& tape,
                                  std::span<const double> output_grad,
                                  std::span<double> param_grad) const {
  const std::size_t layers = widths_.size() - 1;
  if (tape.activations.size() != layers + 1 ||
      output_grad.size() != output_dim() || param_grad.size() != num_params_) {
    throw std::invalid_argument("MLP backward called with mismatched buffers");
  }
  std::vector<std::size_t> offsets(layers);
  for (std::size_t l = 0, off = 0; l < layers; ++l) {
    offsets[l] = off;
    off += widths_[l + 1] * widths_[l] + widths_[l + 1];
  }
  std::vector<double> grad(output_grad.begin(), output_grad.end());
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = widths_[l];
    const std::size_t out = widths_[l + 1];
    const std::vector<double>& x = tape.activations[l];
    const std::vector<double>& y = tape.activations[l + 1];
    if (l + 1 < layers || tanh_output_) {
      for (std::size_t o = 0; o < out; ++o) grad[o] *= 1.0 - y[o] * y[o];
    }
    const double* w = params.data() + offsets[l];
    double* dw = param_grad.data() + offsets[l];
    double* db = dw + out * in;
    std::vector<double> dx(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      db[o] += grad[o];
      for (std::size_t i = 0; i < in; ++i) {
        dw[o * in + i] += grad[o] * x[i];
        dx[i] += w[o * in + i] * grad[o];
      }
    }
    grad = std::move(dx);
  }
  return grad;
}

std::vector<double> Mlp::InitParams(Rng& rng, double output_scale) const {
  std::vector<double> params(num_params_, 0.0);
  std::size_t offset = 0;
  const std::size_t layers = widths_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = widths_[l];
    const std::size_t out = widths_[l + 1];
    double scale = 1.0 / std::sqrt(static_cast<double>(in));
    if (l + 1 == layers) scale *= output_scale;
    std::normal_distribution<double> normal(0.0, scale);
    for (std::size_t k = 0; k < out * in; ++k) params[offset + k] = normal(rng);
    offset += out * in + out;
  }
  return params;
}

MomentumAscent::MomentumAscent(std::size_t num_params, double lr,
                               double momentum, double grad_clip)
    : velocity_(num_params, 0.0),
      lr_(lr),
      momentum_(momentum),
      grad_clip_(grad_clip) {}

void MomentumAscent::Step(std::span<double> params,
                          std::span<const double> direction) {
  if (params.size() != velocity_.size() ||
      direction.size() != velocity_.size()) {
    throw std::invalid_argument("optimizer step with mismatched sizes");
  }
  const double norm = L2Norm(direction);
  const double scale =
      (grad_clip_ > 0.0 && norm > grad_clip_) ? grad_clip_ / norm : 1.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    velocity_[k] = momentum_ * velocity_[k] + scale * direction[k];
    params[k] += lr_ * velocity_[k];
  }
}

double L2Norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

bool AllFinite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace dala
