// SPDX-License-Identifier: Apache-2.0

#include "odor/adam.hpp"

#include <cmath>

namespace odor {

void AdamOptimizer::step(const NamedTensors& params, const NamedTensors& grads) {
  if (params.size() != grads.size()) {
    throw ShapeMismatch("adam: parameter/gradient list size mismatch");
  }
  if (slots_.empty()) {
    slots_.resize(params.size());
    for (std::size_t t = 0; t < params.size(); ++t) {
      slots_[t].m = Matrix(params[t].second->rows(), params[t].second->cols());
      slots_[t].v = Matrix(params[t].second->rows(), params[t].second->cols());
    }
  }
  ++step_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (std::size_t t = 0; t < params.size(); ++t) {
    Matrix& theta = *params[t].second;
    const Matrix& grad = *grads[t].second;
    if (!theta.same_shape(grad)) {
      throw ShapeMismatch("adam: gradient shape mismatch for " + params[t].first);
    }
    Slot& slot = slots_[t];
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double g = grad.at(i);
      slot.m.at(i) = beta1_ * slot.m.at(i) + (1.0 - beta1_) * g;
      slot.v.at(i) = beta2_ * slot.v.at(i) + (1.0 - beta2_) * g * g;
      const double m_hat = slot.m.at(i) / bc1;
      const double v_hat = slot.v.at(i) / bc2;
      theta.at(i) -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
    }
  }
}

}  // namespace odor
