// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "odor/model.hpp"

namespace odor {

inline constexpr int kCheckpointSchemaVersion = 1;

class SchemaVersionMismatch : public std::runtime_error {
 public:
  explicit SchemaVersionMismatch(const std::string& what)
      : std::runtime_error(what) {}
};

class CorruptCheckpoint : public std::runtime_error {
 public:
  explicit CorruptCheckpoint(const std::string& what) : std::runtime_error(what) {}
};

/// JSON record of the model config, label names, and every named parameter
/// tensor. Round trips are bit-exact.
void save_checkpoint(Model& model, const std::vector<std::string>& label_names,
                     const std::string& path);

struct LoadedModel {
  std::unique_ptr<Model> model;
  std::vector<std::string> label_names;
};

LoadedModel load_checkpoint(const std::string& path);

}  // namespace odor
