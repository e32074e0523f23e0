// Copyright 2026 The MT-RAM Authors.
//
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

// Losses and the Adam optimizer.

#ifndef MTRAM_TRAIN_OPTIM_HPP_
#define MTRAM_TRAIN_OPTIM_HPP_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "numcore/tape.hpp"

namespace mtram::train {

class TrainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kProbEpsilon = 1e-12;

// sum_i -y_i log p_i - (1 - y_i) log(1 - p_i), p clamped to [eps, 1 - eps].
double bce_loss(std::span<const double> probs, std::span<const std::uint8_t> targets);
// Tape version over an m x 1 probability column; returns a 1 x 1 node.
num::DiffTensor bce_loss(num::DiffTensor probs, std::span<const std::uint8_t> targets);

struct LossWeights {
  double fine = 0.7;
  double coarse = 0.3;
};

double joint_loss(double loss_fine, double loss_coarse, const LossWeights& w);
num::DiffTensor joint_loss(num::DiffTensor loss_fine, num::DiffTensor loss_coarse,
                           const LossWeights& w);

struct AdamConfig {
  double lr = 0.008;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<num::Matrix> m;
  std::vector<num::Matrix> v;
  std::uint64_t step = 0;
};

// One bias-corrected Adam update from each parameter's grad. All gradients
// are checked for finiteness before any parameter changes.
void adam_step(std::span<num::Parameter* const> params, AdamState& state, const AdamConfig& cfg);

}  // namespace mtram::train

#endif  // MTRAM_TRAIN_OPTIM_HPP_
