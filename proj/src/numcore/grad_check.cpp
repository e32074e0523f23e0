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

#include "numcore/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace mtram::num {

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

GradCheckReport grad_check(const std::function<double()>& loss_and_grad,
                           const std::function<double()>& loss,
                           std::span<Parameter* const> params, double h, double tol) {
  if (!(h > 0.0)) throw NumError("grad_check: step must be positive");
  const double base = loss_and_grad();
  if (!std::isfinite(base)) throw NumError("grad_check: non-finite loss");

  std::vector<Matrix> analytic;
  analytic.reserve(params.size());
  for (Parameter* p : params) {
    if (!p->grad.same_shape(p->value)) p->zero_grad();
    analytic.push_back(p->grad);
  }

  GradCheckReport report;
  report.tolerance = tol;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Parameter& p = *params[pi];
    GradCheckEntry entry;
    entry.name = p.name;
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      const double saved = p.value[k];
      p.value[k] = saved + h;
      const double up = loss();
      p.value[k] = saved - h;
      const double down = loss();
      p.value[k] = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw NumError("grad_check: non-finite loss while perturbing " + p.name);
      }
      const double numeric = (up - down) / (2.0 * h);
      const double err = relative_error(analytic[pi][k], numeric);
      if (err > entry.max_rel_error || k == 0) {
        entry.max_rel_error = std::max(entry.max_rel_error, err);
        entry.worst_index = k;
        entry.analytic_at_worst = analytic[pi][k];
        entry.numeric_at_worst = numeric;
      }
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace mtram::num
