#pragma once

// JSON run configuration shared by the train, pareto and evaluate commands.
//
//   {
//     "dataset":  {"generator": "synthetic_1d" | "synthetic_negbin" | "csv",
//                  "path": "...", "seed": 0, "n_lags": 0, "standardize": true,
//                  "train_fraction": 0.6, "val_fraction": 0.2},
//     "model":    {"family": "tgmm" | "negbin", "components": 2},
//     "train":    {"objective": "nll", "k": 5, "epsilon": 0.0, "lambda": 30,
//                  "M": 1000, "J": 100, "sigma": 0.05, "step_size": 0.1,
//                  "max_epochs": 100, "seed": 0, "eval_every": 1,
//                  "optimizer": "adam", "init": "normal", "init_scale": 0.1,
//                  "patience": 20, "grad_tol": 1e-6, "eval_samples": 1000,
//                  "record_timing": true},
//     "sweep":    {"seeds": [0], "step_sizes": [0.1], "sigmas": [0.05]},
//     "nll_sweep": {...same keys...}, "nll_max_epochs": 1000,
//     "evaluate": {"M": 1000, "trials": 1000, "history_lags": 5},
//     "epsilons": [0.9, 1.0],
//     "warm_start_daml": true,
//     "output_dir": "runs/x",
//     "threads": 1
//   }
//
// Every section and key is optional; unknown keys are rejected. Split
// fractions apply to generators without built-in splits and to CSV input
// (the synthetic 1D panel trains on all periods).

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "daml/evaluate.hpp"
#include "daml/models/model.hpp"
#include "daml/panel.hpp"
#include "daml/sweep.hpp"
#include "daml/training.hpp"

namespace daml {

struct DatasetConfig {
  std::string generator = "synthetic_1d";
  std::filesystem::path path;
  std::uint64_t seed = 0;
  std::size_t n_lags = 0;
  bool standardize = true;
  double train_fraction = 0.6;
  double val_fraction = 0.2;
};

struct ModelConfig {
  std::string family = "tgmm";
  std::size_t components = 2;
};

struct RunConfig {
  DatasetConfig dataset;
  ModelConfig model;
  TrainConfig train;
  std::optional<SweepGrid> sweep;
  std::optional<SweepGrid> nll_sweep;  // pareto only
  std::optional<std::size_t> nll_max_epochs;  // pareto only
  EvaluateOptions evaluate;
  std::optional<std::vector<double>> epsilons;
  bool warm_start_daml = true;
  std::filesystem::path output_dir;
  unsigned threads = 1;
};

/// Parses and validates; throws ValidationError naming the offending key.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

/// Builds (and validates) the dataset a config describes.
std::shared_ptr<const PanelDataset> build_dataset(const DatasetConfig& cfg);
/// Factory for fresh models of the configured family bound to `panel`.
ModelFactory model_factory(const ModelConfig& cfg, std::shared_ptr<const PanelDataset> panel);

}  // namespace daml
