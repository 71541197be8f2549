// SPDX-License-Identifier: Apache-2.0

#include "odor/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "odor/analyze.hpp"
#include "odor/checkpoint.hpp"
#include "odor/config.hpp"
#include "odor/data.hpp"
#include "odor/gradsuite.hpp"
#include "odor/trainer.hpp"

namespace odor {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kGradTolerance = 1e-4;

void require_readable(const std::string& path, const char* what) {
  if (!fs::exists(path)) {
    throw IoError(std::string(what) + " not found: " + path);
  }
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  return out;
}

json metrics_to_json(const MetricsReport& report, double threshold) {
  json doc;
  doc["macro_f1"] = report.macro_f1;
  doc["micro_f1"] = report.micro_f1;
  doc["macro_auroc"] =
      report.macro_auroc ? json(*report.macro_auroc) : json(nullptr);
  doc["auroc_undefined_labels"] = report.auroc_undefined_labels;
  doc["threshold"] = threshold;
  json per_label = json::array();
  for (const PerLabelMetrics& per : report.per_label) {
    per_label.push_back({{"label", per.label},
                         {"f1", per.f1},
                         {"auroc", per.auroc ? json(*per.auroc) : json(nullptr)},
                         {"support", per.support}});
  }
  doc["per_label"] = std::move(per_label);
  return doc;
}

}  // namespace

int cmd_analyze(const std::string& dataset_path, std::size_t top_k,
                const std::string& out_dir) {
  require_readable(dataset_path, "dataset");
  ensure_out_dir(out_dir);

  const std::vector<RawRecord> rows = load_dataset_csv(dataset_path);
  const CleanResult cleaned = clean_dataset(rows);
  write_cleaning_report(out_dir + "/cleaning_report.csv", cleaned);

  const auto frequencies = descriptor_frequencies(cleaned.kept);
  {
    auto out = open_out(out_dir + "/descriptor_frequencies.csv");
    out << "label,count\n";
    for (const DescriptorCount& dc : frequencies) {
      out << dc.label << "," << dc.count << "\n";
    }
  }
  {
    auto out = open_out(out_dir + "/label_count_histogram.csv");
    out << "labels_per_molecule,molecules,fraction\n";
    for (const LabelCountBin& bin : label_count_distribution(cleaned.kept)) {
      out << bin.labels_per_molecule << "," << bin.molecules << ","
          << bin.fraction << "\n";
    }
  }
  {
    const CoOccurrenceMatrix matrix = co_occurrence(cleaned.kept, top_k);
    auto out = open_out(out_dir + "/co_occurrence.csv");
    out << "label";
    for (const std::string& label : matrix.labels) out << "," << label;
    out << "\n";
    for (std::size_t i = 0; i < matrix.labels.size(); ++i) {
      out << matrix.labels[i];
      for (std::size_t j = 0; j < matrix.labels.size(); ++j) {
        out << "," << matrix.counts[i][j];
      }
      out << "\n";
    }
  }

  std::cout << cleaned.kept.size() << " molecules, " << frequencies.size()
            << " descriptors (dropped " << cleaned.dropped.size() << " of "
            << rows.size() << " rows)\n";
  return 0;
}

int cmd_featurize(const std::string& dataset_path, const std::string& out_dir,
                  bool write_atoms) {
  require_readable(dataset_path, "dataset");
  ensure_out_dir(out_dir);

  const CleanResult cleaned = clean_dataset(load_dataset_csv(dataset_path));

  auto pooled_out = open_out(out_dir + "/features_pooled.csv");
  pooled_out << "smiles";
  for (std::size_t j = 0; j < kAtomFeatureCount; ++j) pooled_out << ",f" << j;
  pooled_out << "\n";
  pooled_out.precision(12);

  std::ofstream atoms_out;
  if (write_atoms) {
    atoms_out = open_out(out_dir + "/features_atoms.csv");
    atoms_out << "molecule,atom";
    for (std::size_t j = 0; j < kAtomFeatureCount; ++j) atoms_out << ",f" << j;
    atoms_out << "\n";
    atoms_out.precision(12);
  }

  std::size_t molecule_index = 0;
  for (const RawRecord& rec : cleaned.kept) {
    const MoleculeGraph graph = parse_smiles(rec.smiles);
    const FeatureMatrix atoms = atom_features(graph);
    const FeatureMatrix pooled = pool_molecule(atoms);
    pooled_out << rec.smiles;
    for (std::size_t j = 0; j < pooled.data.cols(); ++j) {
      pooled_out << "," << pooled.data(0, j);
    }
    pooled_out << "\n";
    if (write_atoms) {
      for (std::size_t i = 0; i < atoms.data.rows(); ++i) {
        atoms_out << molecule_index << "," << i;
        for (std::size_t j = 0; j < atoms.data.cols(); ++j) {
          atoms_out << "," << atoms.data(i, j);
        }
        atoms_out << "\n";
      }
    }
    ++molecule_index;
  }
  std::cout << "featurized " << cleaned.kept.size() << " molecules ("
            << cleaned.dropped.size() << " dropped)\n";
  return 0;
}

int cmd_train(const std::string& config_path,
              const std::vector<std::string>& overrides) {
  require_readable(config_path, "config");
  RunConfig cfg = parse_run_config(config_path);
  apply_overrides(cfg, overrides);
  if (cfg.dataset_path.empty()) {
    throw ConfigError({"paths.dataset: required for train"});
  }
  require_readable(cfg.dataset_path, "dataset");
  ensure_out_dir(cfg.out_dir);

  const CleanResult cleaned = clean_dataset(load_dataset_csv(cfg.dataset_path));
  const PreparedDataset data = prepare_dataset(cleaned.kept);
  cfg.model.label_count = data.label_count();

  const auto model = make_model(cfg.model);
  // The initial state is the checkpoint of record until validation improves
  // on it; epochs=0 therefore still writes a loadable file.
  save_checkpoint(*model, data.label_names, cfg.checkpoint_path);

  auto log = open_out(cfg.out_dir + "/train_log.jsonl");
  const auto on_epoch = [&](const EpochRecord& record) {
    json line = {
        {"epoch", record.epoch},
        {"basis", record.losses.basis},
        {"stt", record.losses.stt},
        {"class", record.losses.class_energy},
        {"sample", record.losses.sample},
        {"col", record.losses.col},
        {"total", record.losses.total},
        {"val_f1", record.val_f1},
        {"val_auroc",
         record.val_auroc ? json(*record.val_auroc) : json(nullptr)},
    };
    log << line.dump() << "\n";
    log.flush();
  };
  const auto on_best = [&](Model& best) {
    save_checkpoint(best, data.label_names, cfg.checkpoint_path);
  };

  const TrainResult result =
      fit(*model, data, cfg.train, cfg.loss, on_epoch, on_best);
  if (result.best_epoch > 0) {
    std::cout << "best epoch " << result.best_epoch << " val_f1 "
              << result.best_val_f1 << "; checkpoint " << cfg.checkpoint_path
              << "\n";
  } else {
    std::cout << "no epochs run; initial checkpoint " << cfg.checkpoint_path
              << "\n";
  }
  return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& dataset_path,
             const std::string& out_path) {
  require_readable(checkpoint_path, "checkpoint");
  require_readable(dataset_path, "dataset");

  LoadedModel loaded = load_checkpoint(checkpoint_path);
  const CleanResult cleaned = clean_dataset(load_dataset_csv(dataset_path));
  const PreparedDataset data =
      prepare_dataset_with_labels(cleaned.kept, loaded.label_names);

  std::vector<std::size_t> indices(data.examples.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  const Matrix probs = predict_probs(*loaded.model, data, indices, 64);
  const Matrix labels = [&] {
    Matrix y(data.examples.size(), data.label_count());
    for (std::size_t i = 0; i < y.rows(); ++i)
      for (std::size_t j = 0; j < y.cols(); ++j)
        y(i, j) = data.examples[i].labels[j];
    return y;
  }();

  constexpr double kThreshold = 0.5;
  const MetricsReport report =
      compute_metrics(probs, labels, data.label_names, kThreshold);
  const json doc = metrics_to_json(report, kThreshold);
  if (out_path.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    auto out = open_out(out_path);
    out << doc.dump(2) << "\n";
    std::cout << "macro_f1 " << report.macro_f1 << "; metrics written to "
              << out_path << "\n";
  }
  return 0;
}

int cmd_gradcheck(std::uint64_t seed, double sigma_prime) {
  GradSuiteResult suite = run_gradient_suite(seed, {}, sigma_prime);
  const GradSuiteResult end_to_end = run_end_to_end_suite(seed);
  suite.items.insert(suite.items.end(), end_to_end.items.begin(),
                     end_to_end.items.end());

  bool all_pass = true;
  std::cout.precision(3);
  for (const GradSuiteItem& item : suite.items) {
    const bool pass = item.report.max_rel_err < kGradTolerance;
    all_pass = all_pass && pass;
    std::cout << (pass ? "PASS" : "FAIL") << "  " << std::scientific
              << item.report.max_rel_err << "  " << item.name
              << (item.nudged ? "  (nudged)" : "") << "\n";
  }
  std::cout << (all_pass ? "all gradients verified" : "gradient check FAILED")
            << " (tolerance " << kGradTolerance << ")\n";
  return all_pass ? 0 : 2;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"molecular odor prediction toolkit"};
  app.require_subcommand(1);

  std::string dataset_path;
  std::string out_dir = ".";
  std::size_t top_k = 50;
  auto* analyze =
      app.add_subcommand("analyze", "clean a dataset and write statistics");
  analyze->add_option("--dataset", dataset_path, "dataset CSV")->required();
  analyze->add_option("--top-k", top_k, "co-occurrence matrix size");
  analyze->add_option("--out-dir", out_dir, "output directory");

  bool write_atoms = false;
  auto* featurize =
      app.add_subcommand("featurize", "write pooled molecule features");
  featurize->add_option("--dataset", dataset_path, "dataset CSV")->required();
  featurize->add_option("--out-dir", out_dir, "output directory");
  featurize->add_flag("--atoms", write_atoms, "also write the per-atom matrix");

  std::string config_path;
  std::vector<std::string> overrides;
  bool seed_set = false;
  std::uint64_t seed = 0;
  auto* train = app.add_subcommand("train", "train a model per the run config");
  train->add_option("--config", config_path, "run config file")->required();
  train->add_option("--set", overrides, "override a config key (key=value)");
  train->add_option("--seed", seed, "override the seed")
      ->each([&](const std::string&) { seed_set = true; });
  train->add_option("--out-dir", out_dir, "override the output directory")
      ->each([&](const std::string& v) { overrides.push_back("paths.out_dir=" + v); });

  std::string checkpoint_path;
  std::string metrics_out;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint JSON")->required();
  eval->add_option("--dataset", dataset_path, "dataset CSV")->required();
  eval->add_option("--out", metrics_out, "metrics JSON path (default stdout)");

  std::uint64_t gradcheck_seed = 7;
  double sigma_prime = 1.0;
  auto* gradcheck =
      app.add_subcommand("gradcheck", "verify analytic gradients numerically");
  gradcheck->add_option("--seed", gradcheck_seed, "random seed");
  gradcheck->add_option("--sigma-prime", sigma_prime, "encoder sigma'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(analyze)) {
      return cmd_analyze(dataset_path, top_k, out_dir);
    }
    if (app.got_subcommand(featurize)) {
      return cmd_featurize(dataset_path, out_dir, write_atoms);
    }
    if (app.got_subcommand(train)) {
      if (seed_set) overrides.push_back("seed=" + std::to_string(seed));
      return cmd_train(config_path, overrides);
    }
    if (app.got_subcommand(eval)) {
      return cmd_eval(checkpoint_path, dataset_path, metrics_out);
    }
    if (app.got_subcommand(gradcheck)) {
      return cmd_gradcheck(gradcheck_seed, sigma_prime);
    }
  } catch (const ConfigError& err) {
    std::cerr << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace odor
