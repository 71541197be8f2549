// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "odor/model.hpp"

namespace odor {

/// Adam with bias correction. Moment slots are keyed by tensor position, so
/// the parameter list must be stable across steps.
class AdamOptimizer {
 public:
  AdamOptimizer(double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(const NamedTensors& params, const NamedTensors& grads);

  std::size_t steps_taken() const { return step_; }

 private:
  struct Slot {
    Matrix m;
    Matrix v;
  };

  double lr_, beta1_, beta2_, eps_;
  std::size_t step_ = 0;
  std::vector<Slot> slots_;
};

}  // namespace odor
