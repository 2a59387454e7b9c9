#pragma once

// Hyperparameter sweeps with the validation-based model-selection rules,
// and the likelihood-vs-BPR frontier experiment built on them.
//
// Selection among the runs of one objective:
//   NLL:  lowest validation NLL
//   BPR:  highest validation mean BPR
//   DAML: among runs whose validation BPR is at least the NLL model's, the
//         highest validation likelihood; if none qualify, the highest BPR.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "daml/evaluate.hpp"
#include "daml/models/model.hpp"
#include "daml/panel.hpp"
#include "daml/results.hpp"
#include "daml/training.hpp"

namespace daml {

using ModelFactory = std::function<std::unique_ptr<GenerativeModel>()>;

struct SweepGrid {
  std::vector<std::uint64_t> seeds = {0};
  std::vector<double> step_sizes = {0.1};
  std::vector<double> sigmas = {0.05};  // ignored for NLL runs
};

struct SweepRun {
  TrainConfig config;
  std::string label;
  bool ok = false;
  std::string error;
  TrainResult result;
  std::unique_ptr<GenerativeModel> model;  // at the best checkpoint

  double val_nll() const;
  double val_bpr() const;
};

/// Trains one model per grid point. A failing run is recorded with its
/// error and the sweep continues. With base.output_dir set, run r writes to
/// output_dir/<label>.
std::vector<SweepRun> sweep(const ModelFactory& factory, const PanelDataset& panel, const TrainConfig& base,
                            const SweepGrid& grid);

/// Index of the selected run, or nullopt when every run failed.
/// `reference_val_bpr` is the NLL model's validation BPR (DAML only).
std::optional<std::size_t> select_run(Objective objective, const std::vector<SweepRun>& runs,
                                      double reference_val_bpr = 0.0);

/// {1.0} plus `count` values evenly spaced strictly between the NLL
/// model's and the best training BPR, ascending, duplicates removed.
std::vector<double> default_epsilon_grid(double nll_bpr, double best_bpr, std::size_t count = 4);

/// TrialResult row with training metrics filled and test metrics NaN.
TrialResult trial_row(const SweepRun& run);

struct ParetoConfig {
  TrainConfig base;  // objective and epsilon are set per stage
  SweepGrid grid;
  std::optional<std::vector<double>> epsilons;  // unset: default grid
  EvaluateOptions eval;
  std::filesystem::path output_dir;  // empty: nothing written
  bool warm_start_daml = true;       // DAML runs start from the selected NLL model
  // NLL-stage overrides; unset uses `grid` and `base.max_epochs`.
  std::optional<SweepGrid> nll_grid;
  std::optional<std::size_t> nll_max_epochs;
};

struct ParetoModel {
  TrialResult row;
  std::unique_ptr<GenerativeModel> model;
};

struct ParetoResult {
  std::vector<ParetoModel> selected;  // NLL, BPR, then DAML by ascending epsilon
  std::vector<TrialResult> all_runs;  // every trained run, selected or not
  std::vector<double> epsilons;
};

/// One NLL sweep, one BPR sweep, then a DAML sweep per epsilon; each
/// selected model is evaluated on the test split (train when there is no
/// test split). Writes results.csv, all_runs.csv, bpr_samples/ and run
/// directories under output_dir.
ParetoResult run_pareto(const ModelFactory& factory, const PanelDataset& panel, const ParetoConfig& config);

}  // namespace daml
