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

#include "m4d/opt/optimize.hpp"

#include <cmath>
#include <fstream>

#include "m4d/error.hpp"
#include "m4d/kern/kernels.hpp"

namespace m4d::opt {

void OptimConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive, got " +
                      std::to_string(learning_rate));
  }
  if (iterations < 1) {
    throw ConfigError("iteration budget must be at least 1, got " +
                      std::to_string(iterations));
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) ||
      !(epsilon > 0.0)) {
    throw ConfigError("invalid Adam hyperparameters");
  }
}

MinimizeResult minimize(Objective& objective, const std::vector<double>& x0,
                        const OptimConfig& cfg, BestIterate* best) {
  cfg.validate();
  const std::size_t n = objective.dimension();
  if (x0.size() != n) {
    throw ConfigError("initial point has dimension " + std::to_string(x0.size()) +
                      ", objective expects " + std::to_string(n));
  }

  MinimizeResult result;
  result.x = x0;
  result.term_names = objective.term_names();
  result.loss_trace.reserve(cfg.iterations);

  std::vector<double> grad(n, 0.0);
  std::vector<double> m(n, 0.0);
  std::vector<double> v(n, 0.0);

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    objective.refresh(result.x);
    const double loss = objective.value_grad(result.x, grad);
    if (!std::isfinite(loss)) {
      throw NonFiniteLossError(iter, "objective value is not finite");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(grad[i])) {
        throw NonFiniteLossError(iter, "gradient component " + std::to_string(i) +
                                           " is not finite");
      }
    }

    result.loss_trace.push_back(loss);
    if (!result.term_names.empty()) {
      result.term_trace.push_back(objective.term_values());
    }
    if (best != nullptr && (best->iteration < 0 || loss < best->loss)) {
      best->x = result.x;
      best->loss = loss;
      best->iteration = iter;
    }

    const double t = static_cast<double>(iter) + 1.0;
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    kern::adam_step(result.x.data(), m.data(), v.data(), grad.data(), n,
                    cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon, bc1, bc2);
  }
  return result;
}

void export_trace_csv(const MinimizeResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write trace file: " + path);
  }
  out << "iteration,total";
  for (const std::string& name : result.term_names) out << "," << name;
  out << "\n";
  out.precision(17);
  for (std::size_t i = 0; i < result.loss_trace.size(); ++i) {
    out << i << "," << result.loss_trace[i];
    if (i < result.term_trace.size()) {
      for (double v : result.term_trace[i]) out << "," << v;
    }
    out << "\n";
  }
  if (!out) {
    throw IoError("failed writing trace file: " + path);
  }
}

}  // namespace m4d::opt
