// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace odor {

/// Dataset cleaning + statistics files; prints a one-line summary.
int cmd_analyze(const std::string& dataset_path, std::size_t top_k,
                const std::string& out_dir);

/// Pooled per-molecule feature CSV, optionally with the per-atom matrix.
int cmd_featurize(const std::string& dataset_path, const std::string& out_dir,
                  bool write_atoms);

/// Trains per the run config; writes the best-validation-F1 checkpoint and a
/// JSON-lines log.
int cmd_train(const std::string& config_path,
              const std::vector<std::string>& overrides);

/// Metrics JSON for a checkpoint on a dataset.
int cmd_eval(const std::string& checkpoint_path, const std::string& dataset_path,
             const std::string& out_path);

/// Finite-difference verification table; nonzero exit when any gradient
/// misses the 1e-4 tolerance.
int cmd_gradcheck(std::uint64_t seed, double sigma_prime);

/// Entry point: subcommands analyze, featurize, train, eval, gradcheck.
/// Exit codes: 0 success, 1 validation failure, 2 runtime/numeric failure.
int run_cli(int argc, const char* const* argv);

}  // namespace odor
