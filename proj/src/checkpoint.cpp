// SPDX-License-Identifier: Apache-2.0

#include "odor/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "odor/dataset.hpp"

namespace odor {

namespace {

using nlohmann::json;

const char* mode_name(ModelConfig::Mode mode) {
  return mode == ModelConfig::Mode::Graph ? "graph" : "mlp";
}

ModelConfig::Mode mode_from_name(const std::string& name) {
  if (name == "mlp") return ModelConfig::Mode::Mlp;
  if (name == "graph") return ModelConfig::Mode::Graph;
  throw SchemaVersionMismatch("checkpoint: unknown model mode '" + name + "'");
}

}  // namespace

void save_checkpoint(Model& model, const std::vector<std::string>& label_names,
                     const std::string& path) {
  const ModelConfig& cfg = model.config();
  json doc;
  doc["schema_version"] = kCheckpointSchemaVersion;
  doc["model"] = {
      {"mode", mode_name(cfg.mode)},
      {"hidden_dims", cfg.hidden_dims},
      {"hmfm_half_dim", cfg.hmfm_half_dim},
      {"hmfm_sigma_prime", cfg.hmfm_sigma_prime},
      {"hmfm_identity_projection", cfg.hmfm_identity_projection},
      {"graph_rounds", cfg.graph_rounds},
      {"feature_dim", cfg.feature_dim},
      {"label_count", cfg.label_count},
      {"seed", cfg.seed},
  };
  doc["labels"] = label_names;
  json tensors = json::object();
  for (auto& [name, tensor] : model.parameters()) {
    tensors[name] = {{"rows", tensor->rows()},
                     {"cols", tensor->cols()},
                     {"data", tensor->data()}};
  }
  doc["tensors"] = std::move(tensors);

  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out << doc.dump();
  out << "\n";
}

LoadedModel load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& err) {
    throw CorruptCheckpoint("checkpoint parse error in " + path + ": " + err.what());
  }

  try {
    const int version = doc.at("schema_version").get<int>();
    if (version != kCheckpointSchemaVersion) {
      throw SchemaVersionMismatch("checkpoint schema version " +
                                  std::to_string(version) + ", expected " +
                                  std::to_string(kCheckpointSchemaVersion));
    }
    const json& model_doc = doc.at("model");
    ModelConfig cfg;
    cfg.mode = mode_from_name(model_doc.at("mode").get<std::string>());
    cfg.hidden_dims = model_doc.at("hidden_dims").get<std::vector<std::size_t>>();
    cfg.hmfm_half_dim = model_doc.at("hmfm_half_dim").get<std::size_t>();
    cfg.hmfm_sigma_prime = model_doc.at("hmfm_sigma_prime").get<double>();
    cfg.hmfm_identity_projection =
        model_doc.at("hmfm_identity_projection").get<bool>();
    cfg.graph_rounds = model_doc.at("graph_rounds").get<std::size_t>();
    cfg.feature_dim = model_doc.at("feature_dim").get<std::size_t>();
    cfg.label_count = model_doc.at("label_count").get<std::size_t>();
    cfg.seed = model_doc.at("seed").get<std::uint64_t>();

    LoadedModel loaded;
    loaded.label_names = doc.at("labels").get<std::vector<std::string>>();
    if (loaded.label_names.size() != cfg.label_count) {
      throw SchemaVersionMismatch(
          "checkpoint label list length does not match label_count");
    }
    loaded.model = make_model(cfg);

    const json& tensors = doc.at("tensors");
    NamedTensors params = loaded.model->parameters();
    if (tensors.size() != params.size()) {
      throw SchemaVersionMismatch("checkpoint holds " +
                                  std::to_string(tensors.size()) +
                                  " tensors, model expects " +
                                  std::to_string(params.size()));
    }
    for (auto& [name, tensor] : params) {
      if (!tensors.contains(name)) {
        throw SchemaVersionMismatch("checkpoint missing tensor '" + name + "'");
      }
      const json& entry = tensors.at(name);
      const auto rows = entry.at("rows").get<std::size_t>();
      const auto cols = entry.at("cols").get<std::size_t>();
      if (rows != tensor->rows() || cols != tensor->cols()) {
        throw SchemaVersionMismatch("checkpoint tensor '" + name +
                                    "' has shape " + std::to_string(rows) + "x" +
                                    std::to_string(cols) + ", model expects " +
                                    std::to_string(tensor->rows()) + "x" +
                                    std::to_string(tensor->cols()));
      }
      tensor->data() = entry.at("data").get<std::vector<double>>();
    }
    return loaded;
  } catch (const json::exception& err) {
    throw CorruptCheckpoint("checkpoint field error in " + path + ": " + err.what());
  }
}

}  // namespace odor
