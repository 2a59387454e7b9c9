#pragma once

// Held-out evaluation of a trained model on one split.
//
// BPR distribution: trial i draws, for every period of the split, a fresh
// M-sample batch, ranks sites with the ratio estimator and scores the top-K
// against the observed y_t; the trial value is the mean over periods.
// Point predictions for MAE/RMSE are per-site Monte-Carlo means of M draws.
//
// Reference rankers that need no training:
//   zero:       y_hat = 0 everywhere (ties resolve to the lowest site ids)
//   historical: y_hat_t = mean of the previous `history_lags` observed counts

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "daml/models/model.hpp"
#include "daml/panel.hpp"

namespace daml {

struct EvaluateOptions {
  std::size_t k = 1;
  std::size_t num_samples = 1000;  // M
  std::size_t num_trials = 1000;
  std::size_t history_lags = 5;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct BaselineMetrics {
  double bpr_mean = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
};

struct EvaluationReport {
  std::size_t periods = 0;
  double nll_total = 0.0;  // sum_t -log p(y_t)
  double nll_mean = 0.0;
  double loglik_mean = 0.0;       // -nll_mean
  std::vector<double> bpr_trials;  // one value per trial
  double bpr_mean = 0.0;
  double bpr_p05 = 0.0;
  double bpr_p50 = 0.0;
  double bpr_p95 = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  std::size_t degenerate_periods = 0;
  BaselineMetrics zero;
  BaselineMetrics historical;
};

/// Linear-interpolation quantile (type 7) of unsorted values.
double quantile(std::vector<double> values, double p);

EvaluationReport evaluate_model(const GenerativeModel& model, const PanelDataset& panel, SplitRange split,
                                const EvaluateOptions& options);

/// Reference-ranker metrics alone.
BaselineMetrics zero_baseline(const PanelDataset& panel, SplitRange split, std::size_t k);
BaselineMetrics historical_baseline(const PanelDataset& panel, SplitRange split, std::size_t k, std::size_t lags);

/// One BPR value per line after a schema comment and a "bpr" header.
void write_bpr_samples(const std::filesystem::path& path, const std::vector<double>& values);
std::vector<double> read_bpr_samples(const std::filesystem::path& path);

}  // namespace daml
