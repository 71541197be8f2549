// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "odor/gradcheck.hpp"

namespace odor {

struct GradSuiteItem {
  std::string name;
  GradCheckReport report;
  bool nudged = false;  // inputs were redrawn to move off a hinge kink
};

struct GradSuiteResult {
  std::vector<GradSuiteItem> items;

  double worst() const {
    double w = 0.0;
    for (const auto& item : items) w = std::max(w, item.report.max_rel_err);
    return w;
  }
  bool all_below(double tol) const { return worst() < tol; }
};

struct GradSuiteDims {
  std::size_t batch = 8;        // N
  std::size_t labels = 12;      // M
  std::size_t mol_features = 6; // F
  std::size_t input_dim = 22;   // A
  std::size_t half_dim = 16;    // D
};

/// Finite-difference verification of every analytic gradient: each loss
/// component and the total with respect to logits, and the encoder with
/// respect to each learnable tensor. Random inputs are redrawn until no
/// hinge or similarity margin sits within finite-difference reach of a kink.
GradSuiteResult run_gradient_suite(std::uint64_t seed,
                                   const GradSuiteDims& dims = {},
                                   double sigma_prime = 1.0);

/// End-to-end check: total loss through the MLP backbone, finite differences
/// against backprop for every parameter tensor.
GradSuiteResult run_end_to_end_suite(std::uint64_t seed);

}  // namespace odor
