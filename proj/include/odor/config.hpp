// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "odor/cil.hpp"
#include "odor/model.hpp"
#include "odor/trainer.hpp"

namespace odor {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& problems) {
    std::string out = "invalid configuration:";
    for (const std::string& p : problems) out += "\n  - " + p;
    return out;
  }
  std::vector<std::string> problems_;
};

/// Merged settings for a run. Loaded from a flat key=value file with dotted
/// section prefixes (e.g. `loss.lambda1=0.3`); command-line overrides use the
/// same keys.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string dataset_path;
  std::string out_dir = ".";
  std::string checkpoint_path;  // defaults to <out_dir>/checkpoint.json
  LossConfig loss;
  ModelConfig model;
  TrainConfig train;
};

/// Parses the config file. Unknown keys, unparsable values, and invariant
/// violations are all collected and reported together in one ConfigError.
RunConfig parse_run_config(const std::string& path);

/// Applies `key=value` strings on top of an existing config (CLI overrides),
/// then re-validates. Throws ConfigError listing every problem.
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides);

/// Invariant check used by both entry points; returns problem list.
std::vector<std::string> validate_run_config(const RunConfig& cfg);

}  // namespace odor
