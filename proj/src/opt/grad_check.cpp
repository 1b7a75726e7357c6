// Copyright 2026 The m4d Authors
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

#include "m4d/opt/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace m4d::opt {

GradCheckReport grad_check(Objective& objective, const std::vector<double>& x,
                           double rel_tol) {
  constexpr double kStep = 1e-5;
  constexpr double kAbsFloor = 1e-8;

  GradCheckReport report;
  report.dimension = objective.dimension();
  report.pass = true;

  objective.refresh(x);
  std::vector<double> grad(report.dimension, 0.0);
  objective.value_grad(x, grad);

  std::vector<double> probe = x;
  for (std::size_t i = 0; i < report.dimension; ++i) {
    const double xi = probe[i];
    probe[i] = xi + kStep;
    const double plus = objective.value(probe);
    probe[i] = xi - kStep;
    const double minus = objective.value(probe);
    probe[i] = xi;

    const double fd = (plus - minus) / (2.0 * kStep);
    const double abs_err = std::abs(grad[i] - fd);
    report.max_abs_error = std::max(report.max_abs_error, abs_err);
    if (abs_err < kAbsFloor) continue;

    const double rel = abs_err / std::max(std::abs(grad[i]), std::abs(fd));
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_index = static_cast<std::ptrdiff_t>(i);
    }
    if (rel >= rel_tol) report.pass = false;
  }
  return report;
}

}  // namespace m4d::opt
