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

#ifndef MTRAM_NUMCORE_GRAD_CHECK_HPP_
#define MTRAM_NUMCORE_GRAD_CHECK_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "numcore/tape.hpp"

namespace mtram::num {

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool passed() const { return max_rel_error <= tolerance; }
};

// |a - n| / max(1e-8, |a| + |n|)
double relative_error(double analytic, double numeric);

// Compares analytic gradients against central differences.
//
// `loss_and_grad` must zero the gradients of `params`, evaluate the loss and
// run the backward pass; `loss` evaluates the same function without
// touching gradients. Every entry of every parameter is perturbed by +-h.
GradCheckReport grad_check(const std::function<double()>& loss_and_grad,
                           const std::function<double()>& loss,
                           std::span<Parameter* const> params, double h, double tol);

}  // namespace mtram::num

#endif  // MTRAM_NUMCORE_GRAD_CHECK_HPP_
