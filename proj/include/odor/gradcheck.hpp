// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <stdexcept>

#include "odor/matrix.hpp"

namespace odor {

class NonFiniteFunctionValue : public std::runtime_error {
 public:
  explicit NonFiniteFunctionValue(const std::string& what)
      : std::runtime_error(what) {}
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::size_t worst_row = 0;
  std::size_t worst_col = 0;
  double analytic = 0.0;  // analytic gradient at the worst entry
  double numeric = 0.0;   // central-difference gradient at the worst entry
};

/// Compares `analytic_grad` against central finite differences of the scalar
/// function `f` around `theta`. Relative error per entry is
/// |g_a - g_n| / max(1e-8, |g_a| + |g_n|).
GradCheckReport grad_check(const std::function<double(const Matrix&)>& f,
                           const Matrix& analytic_grad, Matrix theta,
                           double eps = 1e-5);

}  // namespace odor
