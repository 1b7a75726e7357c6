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

#ifndef M4D_OPT_OPTIMIZE_HPP_
#define M4D_OPT_OPTIMIZE_HPP_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace m4d::opt {

struct OptimConfig {
  double learning_rate = 0.01;
  int iterations = 1000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;  // throws ConfigError on lr <= 0 or iterations < 1
};

// Scalar objective over a flat parameter vector. Non-smooth ingredients
// (nearest-neighbor assignments, active min/max selections) are recomputed in
// refresh() and held fixed across value/value_grad calls, which keeps the
// gradient well-defined between refreshes.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dimension() const = 0;
  virtual void refresh(const std::vector<double>& x) { (void)x; }
  virtual double value(const std::vector<double>& x) = 0;
  // Writes the full gradient into grad (resized by the caller) and returns
  // the loss. Must agree with value() under the same frozen assignments.
  virtual double value_grad(const std::vector<double>& x,
                            std::vector<double>& grad) = 0;

  // Optional per-term breakdown of the last value/value_grad call, used for
  // loss traces. Both lists must stay parallel.
  virtual std::vector<std::string> term_names() const { return {}; }
  virtual std::vector<double> term_values() const { return {}; }
};

// Adapter for plain functions, mainly test fixtures. fn(x, grad) returns the
// loss and fills grad when grad != nullptr.
class FunctionObjective final : public Objective {
 public:
  using Fn = std::function<double(const std::vector<double>&, std::vector<double>*)>;

  FunctionObjective(std::size_t dimension, Fn fn)
      : dimension_(dimension), fn_(std::move(fn)) {}

  std::size_t dimension() const override { return dimension_; }
  double value(const std::vector<double>& x) override { return fn_(x, nullptr); }
  double value_grad(const std::vector<double>& x, std::vector<double>& grad) override {
    return fn_(x, &grad);
  }

 private:
  std::size_t dimension_;
  Fn fn_;
};

struct MinimizeResult {
  std::vector<double> x;
  std::vector<double> loss_trace;                // total loss per iteration
  std::vector<std::string> term_names;           // empty when untracked
  std::vector<std::vector<double>> term_trace;   // per iteration, parallel to names
};

// Lowest-loss iterate seen across one or more minimize calls. Callers that
// need a monotone guarantee (returned loss never above the initial loss) read
// x from here instead of MinimizeResult::x; iteration is -1 until the first
// evaluation lands.
struct BestIterate {
  std::vector<double> x;
  double loss = 0.0;
  int iteration = -1;
};

// Runs exactly cfg.iterations Adam steps from x0, refreshing frozen
// assignments once per iteration before the gradient evaluation. Throws
// NonFiniteLossError with the iteration index when the loss or any gradient
// component stops being finite. When best is non-null it is updated with the
// lowest-loss evaluated iterate; x0 itself is evaluated first, so best->loss
// never exceeds the initial loss. Passing the same BestIterate to several
// calls accumulates the minimum across all of them.
MinimizeResult minimize(Objective& objective, const std::vector<double>& x0,
                        const OptimConfig& cfg, BestIterate* best = nullptr);

// CSV with header "iteration,total[,term...]" and one row per iteration.
void export_trace_csv(const MinimizeResult& result, const std::string& path);

}  // namespace m4d::opt

#endif  // M4D_OPT_OPTIMIZE_HPP_
