#pragma once

// Full-batch gradient training of a GenerativeModel under one of the three
// objectives, with periodic evaluation, best-checkpoint tracking, early
// stopping and resumable state.
//
// Epoch 0 is the initial parameters (evaluated, no update). Epoch e >= 1
// computes the objective with epoch-e randomness, takes one optimizer step
// and, every eval_every epochs, evaluates on the train and validation
// splits. The retained checkpoint minimises the selection score:
//   NLL:  validation NLL per period
//   BPR:  -(validation mean BPR)
//   DAML: validation mean of lambda max(eps - BPR_t, 0) - log p(y_t)

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "daml/checkpoint.hpp"
#include "daml/models/model.hpp"
#include "daml/objectives.hpp"
#include "daml/optim.hpp"
#include "daml/panel.hpp"

namespace daml {

enum class InitMode { kNormal, kQuantile };

std::string to_string(InitMode mode);
InitMode parse_init_mode(const std::string& name);

struct TrainConfig {
  Objective objective = Objective::kNll;
  std::size_t k = 1;
  double epsilon = 0.0;
  double lambda = 30.0;
  std::size_t num_samples = 1000;       // M
  std::size_t num_perturbations = 100;  // J
  double sigma = 0.05;
  double step_size = 0.1;
  std::size_t max_epochs = 100;
  std::uint64_t seed = 0;
  std::size_t eval_every = 1;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  InitMode init = InitMode::kNormal;
  double init_scale = 0.1;
  // Warm start: when non-empty, training starts from these parameters
  // exactly and `init` / `init_scale` are ignored.
  Vector init_params;
  std::size_t patience = 20;  // evaluation windows without improvement
  double grad_tol = 1e-6;
  std::size_t eval_samples = 1000;  // M used for evaluation rankings
  unsigned threads = 1;
  bool record_timing = true;  // false writes wall_ms = 0 for byte-stable logs

  // Optional outputs. With an output directory, training writes
  // metrics.csv, best.ckpt and last.ckpt there.
  std::filesystem::path output_dir;
  bool resume = false;  // continue from output_dir/last.ckpt if present

  void validate(std::size_t num_sites) const;
  ObjectiveConfig objective_config() const;
};

struct EpochRecord {
  long long epoch = 0;
  double objective = 0.0;
  double train_nll = 0.0;  // per period
  double train_bpr_mean = 0.0;
  double val_nll = 0.0;  // per period
  double val_bpr_mean = 0.0;
  double grad_norm = 0.0;
  double wall_ms = 0.0;
  bool evaluated = false;
};

struct TrainResult {
  Checkpoint best;
  std::vector<EpochRecord> history;
  long long epochs_run = 0;  // last completed epoch
  std::string stop_reason;   // max_epochs | converged | patience
};

/// Draws initial parameters into `model`. kNormal: phi ~ N(0, init_scale^2).
/// kQuantile: a data-informed starting point from training-split counts
/// (TGMM component means at count quantiles of sorted uniform levels,
/// NegBin intercept at the log mean count), then N(0, init_scale^2) jitter
/// on every raw entry.
void initialize_params(GenerativeModel& model, const PanelDataset& panel, const TrainConfig& cfg);

/// Trains `model` in place (it ends at the last iterate; the best iterate is
/// in the result). Initialises parameters unless resuming.
TrainResult train(GenerativeModel& model, const PanelDataset& panel, const TrainConfig& cfg);

void write_metrics_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history);
std::vector<EpochRecord> read_metrics_csv(const std::filesystem::path& path);

}  // namespace daml
