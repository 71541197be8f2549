// SPDX-License-Identifier: Apache-2.0

#include "odor/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "odor/dataset.hpp"

namespace odor {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& text, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(text, &used);
    return used == text.size();
  } catch (...) {
    return false;
  }
}

bool parse_u64(const std::string& text, std::uint64_t& out) {
  if (text.empty()) return false;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

bool parse_bool(const std::string& text, bool& out) {
  if (text == "true" || text == "1") { out = true; return true; }
  if (text == "false" || text == "0") { out = false; return true; }
  return false;
}

bool parse_size_list(const std::string& text, std::vector<std::size_t>& out) {
  out.clear();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::uint64_t v = 0;
    if (!parse_u64(trim(item), v)) return false;
    out.push_back(static_cast<std::size_t>(v));
  }
  return !out.empty();
}

using Setter =
    std::function<bool(RunConfig&, const std::string&)>;  // false = bad value

// The full key table; unknown keys are rejected by lookup failure.
const std::map<std::string, Setter>& key_table() {
  static const std::map<std::string, Setter> table = {
      {"seed",
       [](RunConfig& c, const std::string& v) { return parse_u64(v, c.seed); }},
      {"paths.dataset",
       [](RunConfig& c, const std::string& v) { c.dataset_path = v; return true; }},
      {"paths.out_dir",
       [](RunConfig& c, const std::string& v) { c.out_dir = v; return true; }},
      {"paths.checkpoint",
       [](RunConfig& c, const std::string& v) { c.checkpoint_path = v; return true; }},
      {"loss.lambda1",
       [](RunConfig& c, const std::string& v) { return parse_double(v, c.loss.lambda1); }},
      {"loss.lambda2",
       [](RunConfig& c, const std::string& v) { return parse_double(v, c.loss.lambda2); }},
      {"loss.lambda3",
       [](RunConfig& c, const std::string& v) { return parse_double(v, c.loss.lambda3); }},
      {"loss.lambda4",
       [](RunConfig& c, const std::string& v) { return parse_double(v, c.loss.lambda4); }},
      {"loss.tau",
       [](RunConfig& c, const std::string& v) { return parse_double(v, c.loss.tau); }},
      {"loss.c",
       [](RunConfig& c, const std::string& v) { return parse_double(v, c.loss.cooccur); }},
      {"loss.e1",
       [](RunConfig& c, const std::string& v) { return parse_double(v, c.loss.energy_base); }},
      {"loss.e2",
       [](RunConfig& c, const std::string& v) {
         return parse_double(v, c.loss.energy_per_label);
       }},
      {"loss.weight_clamp_lo",
       [](RunConfig& c, const std::string& v) {
         return parse_double(v, c.loss.weight_clamp_lo);
       }},
      {"loss.weight_clamp_hi",
       [](RunConfig& c, const std::string& v) {
         return parse_double(v, c.loss.weight_clamp_hi);
       }},
      {"loss.weight_scope",
       [](RunConfig& c, const std::string& v) {
         if (v == "batch") { c.loss.weight_scope = WeightScope::Batch; return true; }
         if (v == "global") { c.loss.weight_scope = WeightScope::Global; return true; }
         return false;
       }},
      {"loss.sim_mode",
       [](RunConfig& c, const std::string& v) {
         if (v == "pairwise_cosine") {
           c.loss.sim_mode = SimMode::PairwiseCosine;
           return true;
         }
         if (v == "frobenius_literal") {
           c.loss.sim_mode = SimMode::FrobeniusLiteral;
           return true;
         }
         return false;
       }},
      {"loss.class_count_scaling",
       [](RunConfig& c, const std::string& v) {
         return parse_bool(v, c.loss.class_count_scaling);
       }},
      {"hmfm.D",
       [](RunConfig& c, const std::string& v) {
         std::uint64_t d = 0;
         if (!parse_u64(v, d)) return false;
         c.model.hmfm_half_dim = static_cast<std::size_t>(d);
         return true;
       }},
      {"hmfm.sigma_prime",
       [](RunConfig& c, const std::string& v) {
         return parse_double(v, c.model.hmfm_sigma_prime);
       }},
      {"hmfm.identity_projection",
       [](RunConfig& c, const std::string& v) {
         return parse_bool(v, c.model.hmfm_identity_projection);
       }},
      {"model.mode",
       [](RunConfig& c, const std::string& v) {
         if (v == "mlp") { c.model.mode = ModelConfig::Mode::Mlp; return true; }
         if (v == "graph") { c.model.mode = ModelConfig::Mode::Graph; return true; }
         return false;
       }},
      {"model.hidden_dims",
       [](RunConfig& c, const std::string& v) {
         return parse_size_list(v, c.model.hidden_dims);
       }},
      {"model.graph_rounds",
       [](RunConfig& c, const std::string& v) {
         std::uint64_t r = 0;
         if (!parse_u64(v, r)) return false;
         c.model.graph_rounds = static_cast<std::size_t>(r);
         return true;
       }},
      {"train.lr",
       [](RunConfig& c, const std::string& v) { return parse_double(v, c.train.lr); }},
      {"train.batch_size",
       [](RunConfig& c, const std::string& v) {
         std::uint64_t b = 0;
         if (!parse_u64(v, b)) return false;
         c.train.batch_size = static_cast<std::size_t>(b);
         return true;
       }},
      {"train.epochs",
       [](RunConfig& c, const std::string& v) {
         std::uint64_t e = 0;
         if (!parse_u64(v, e)) return false;
         c.train.epochs = static_cast<std::size_t>(e);
         return true;
       }},
      {"train.train_fraction",
       [](RunConfig& c, const std::string& v) {
         return parse_double(v, c.train.train_fraction);
       }},
  };
  return table;
}

void apply_one(RunConfig& cfg, const std::string& key, const std::string& value,
               std::vector<std::string>& problems) {
  const auto& table = key_table();
  const auto it = table.find(key);
  if (it == table.end()) {
    problems.push_back("unknown key '" + key + "'");
    return;
  }
  if (!it->second(cfg, value)) {
    problems.push_back("bad value for '" + key + "': '" + value + "'");
  }
}

}  // namespace

std::vector<std::string> validate_run_config(const RunConfig& cfg) {
  std::vector<std::string> problems;
  auto require = [&](bool ok, const std::string& message) {
    if (!ok) problems.push_back(message);
  };
  require(cfg.loss.lambda1 >= 0.0, "loss.lambda1: must be >= 0");
  require(cfg.loss.lambda2 >= 0.0, "loss.lambda2: must be >= 0");
  require(cfg.loss.lambda3 >= 0.0, "loss.lambda3: must be >= 0");
  require(cfg.loss.lambda4 >= 0.0, "loss.lambda4: must be >= 0");
  require(cfg.loss.tau > 0.0 && cfg.loss.tau < 1.0, "loss.tau: must be in (0,1)");
  require(cfg.loss.weight_clamp_lo <= cfg.loss.weight_clamp_hi,
          "loss.weight_clamp_lo: must be <= loss.weight_clamp_hi");
  require(cfg.loss.weight_clamp_lo > 0.0, "loss.weight_clamp_lo: must be > 0");
  require(cfg.train.lr > 0.0, "train.lr: must be > 0");
  require(cfg.train.batch_size >= 1, "train.batch_size: must be >= 1");
  require(cfg.train.train_fraction > 0.0 && cfg.train.train_fraction <= 1.0,
          "train.train_fraction: must be in (0,1]");
  require(cfg.model.hmfm_half_dim >= 1, "hmfm.D: must be >= 1");
  require(!cfg.model.hidden_dims.empty(), "model.hidden_dims: must be non-empty");
  for (std::size_t h : cfg.model.hidden_dims) {
    if (h == 0) {
      problems.push_back("model.hidden_dims: dimensions must be >= 1");
      break;
    }
  }
  require(cfg.model.graph_rounds >= 1, "model.graph_rounds: must be >= 1");
  if (cfg.model.hmfm_identity_projection &&
      cfg.model.hmfm_half_dim != cfg.model.feature_dim) {
    problems.push_back("hmfm.identity_projection: requires hmfm.D == " +
                       std::to_string(cfg.model.feature_dim));
  }
  return problems;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);

  RunConfig cfg;
  std::vector<std::string> problems;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(line_no) +
                         ": expected key=value, got '" + stripped + "'");
      continue;
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    apply_one(cfg, key, value, problems);
  }

  const std::vector<std::string> invariants = validate_run_config(cfg);
  problems.insert(problems.end(), invariants.begin(), invariants.end());
  if (!problems.empty()) throw ConfigError(std::move(problems));

  if (cfg.checkpoint_path.empty()) {
    cfg.checkpoint_path = cfg.out_dir + "/checkpoint.json";
  }
  cfg.train.seed = cfg.seed;
  cfg.model.seed = cfg.seed;
  return cfg;
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides) {
  std::vector<std::string> problems;
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      problems.push_back("override '" + item + "': expected key=value");
      continue;
    }
    apply_one(cfg, trim(item.substr(0, eq)), trim(item.substr(eq + 1)), problems);
  }
  const std::vector<std::string> invariants = validate_run_config(cfg);
  problems.insert(problems.end(), invariants.begin(), invariants.end());
  if (!problems.empty()) throw ConfigError(std::move(problems));
  cfg.train.seed = cfg.seed;
  cfg.model.seed = cfg.seed;
}

}  // namespace odor
