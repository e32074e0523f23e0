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

#include "train/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "numcore/ops.hpp"

namespace mtram::train {
namespace {

double clamp_prob(double p) { return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon); }

void check_lengths(std::size_t probs, std::size_t targets) {
  if (probs != targets) {
    throw TrainError("bce_loss: " + std::to_string(probs) + " probabilities vs " +
                     std::to_string(targets) + " targets");
  }
}

}  // namespace

double bce_loss(std::span<const double> probs, std::span<const std::uint8_t> targets) {
  check_lengths(probs.size(), targets.size());
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = clamp_prob(probs[i]);
    total += targets[i] ? -std::log(p) : -std::log(1.0 - p);
  }
  return total;
}

num::DiffTensor bce_loss(num::DiffTensor probs, std::span<const std::uint8_t> targets) {
  const num::Matrix& pv = probs.value();
  if (pv.cols() != 1) throw TrainError("bce_loss: probabilities must be a column");
  check_lengths(pv.rows(), targets.size());
  const double loss = bce_loss(pv.data(), targets);
  const std::size_t ip = probs.id();
  std::vector<std::uint8_t> y(targets.begin(), targets.end());
  return probs.tape()->record("bce_loss", num::Matrix(1, 1, loss),
                              [ip, y = std::move(y)](num::Tape& tp, std::size_t self) {
    const double g = tp.grad(self)[0];
    const auto& p = tp.value(ip).data();
    auto& gp = tp.grad(ip).data();
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double pc = clamp_prob(p[i]);
      gp[i] += g * (y[i] ? -1.0 / pc : 1.0 / (1.0 - pc));
    }
  });
}

double joint_loss(double loss_fine, double loss_coarse, const LossWeights& w) {
  return w.fine * loss_fine + w.coarse * loss_coarse;
}

num::DiffTensor joint_loss(num::DiffTensor loss_fine, num::DiffTensor loss_coarse,
                           const LossWeights& w) {
  return num::add(num::scale(loss_fine, w.fine), num::scale(loss_coarse, w.coarse));
}

void adam_step(std::span<num::Parameter* const> params, AdamState& state, const AdamConfig& cfg) {
  if (state.m.empty()) {
    for (num::Parameter* p : params) {
      state.m.emplace_back(p->value.rows(), p->value.cols());
      state.v.emplace_back(p->value.rows(), p->value.cols());
    }
  }
  if (state.m.size() != params.size()) {
    throw TrainError("adam_step: optimizer state tracks " + std::to_string(state.m.size()) +
                     " parameters, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const num::Parameter& p = *params[i];
    if (!p.grad.same_shape(p.value) || !state.m[i].same_shape(p.value)) {
      throw TrainError("adam_step: shape mismatch for " + p.name);
    }
    for (double g : p.grad.data()) {
      if (!std::isfinite(g)) throw TrainError("adam_step: non-finite gradient in " + p.name);
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& theta = params[i]->value.data();
    const auto& g = params[i]->grad.data();
    auto& m = state.m[i].data();
    auto& v = state.v[i].data();
    for (std::size_t k = 0; k < theta.size(); ++k) {
      m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
      v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      theta[k] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

}  // namespace mtram::train
