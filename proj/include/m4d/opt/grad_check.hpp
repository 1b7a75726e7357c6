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

#ifndef M4D_OPT_GRAD_CHECK_HPP_
#define M4D_OPT_GRAD_CHECK_HPP_

#include <cstddef>
#include <vector>

#include "m4d/opt/optimize.hpp"

namespace m4d::opt {

struct GradCheckReport {
  bool pass = false;
  double max_rel_error = 0.0;   // over coordinates above the absolute floor
  double max_abs_error = 0.0;
  std::ptrdiff_t worst_index = -1;
  std::size_t dimension = 0;
};

// Compares the analytic gradient against central finite differences with
// h = 1e-5 per coordinate. Assignments are refreshed once at x and stay
// frozen through every probe, so non-smooth selections cannot flip mid-check.
// A coordinate passes when |g - fd| < 1e-8 or the relative error
// |g - fd| / max(|g|, |fd|) stays below rel_tol.
GradCheckReport grad_check(Objective& objective, const std::vector<double>& x,
                           double rel_tol);

}  // namespace m4d::opt

#endif  // M4D_OPT_GRAD_CHECK_HPP_
