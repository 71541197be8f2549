// SPDX-License-Identifier: Apache-2.0

#include "odor/gradcheck.hpp"

#include <cmath>

namespace odor {

GradCheckReport grad_check(const std::function<double(const Matrix&)>& f,
                           const Matrix& analytic_grad, Matrix theta,
                           double eps) {
  if (!analytic_grad.same_shape(theta)) {
    throw ShapeMismatch("grad_check: gradient shape does not match parameter");
  }
  GradCheckReport report;
  for (std::size_t i = 0; i < theta.rows(); ++i) {
    for (std::size_t j = 0; j < theta.cols(); ++j) {
      const double saved = theta(i, j);
      theta(i, j) = saved + eps;
      const double hi = f(theta);
      theta(i, j) = saved - eps;
      const double lo = f(theta);
      theta(i, j) = saved;
      if (!std::isfinite(hi) || !std::isfinite(lo)) {
        throw NonFiniteFunctionValue("grad_check: non-finite value at entry (" +
                                     std::to_string(i) + "," + std::to_string(j) + ")");
      }
      const double numeric = (hi - lo) / (2.0 * eps);
      const double analytic = analytic_grad(i, j);
      const double denom = std::max(1e-8, std::fabs(analytic) + std::fabs(numeric));
      const double rel = std::fabs(analytic - numeric) / denom;
      if (rel > report.max_rel_err) {
        report.max_rel_err = rel;
        report.worst_row = i;
        report.worst_col = j;
        report.analytic = analytic;
        report.numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace odor
