#pragma once

// Result records consumed by the plotting component.
//
// TrialResult CSV: '# schema_version: 1' comment, header row, one row per
// trained model. Columns (fixed order):
//   model_label, objective, epsilon, lambda, seed, step_size, sigma, status,
//   best_epoch, train_loglik, train_bpr_mean, val_loglik, val_bpr_mean,
//   test_loglik, bpr_mean, bpr_p05, bpr_p50, bpr_p95, bpr_samples_path,
//   checkpoint_path, error
// Log-likelihoods are per-period means. status is "ok" or "failed"; failed
// rows carry the message in `error` and nan metrics.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace daml {

struct TrialResult {
  std::string model_label;
  std::string objective;
  double epsilon = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  double step_size = 0.0;
  double sigma = 0.0;
  std::string status = "ok";
  long long best_epoch = 0;
  double train_loglik = 0.0;
  double train_bpr_mean = 0.0;
  double val_loglik = 0.0;
  double val_bpr_mean = 0.0;
  double test_loglik = 0.0;
  double bpr_mean = 0.0;
  double bpr_p05 = 0.0;
  double bpr_p50 = 0.0;
  double bpr_p95 = 0.0;
  std::string bpr_samples_path;
  std::string checkpoint_path;
  std::string error;
};

const std::vector<std::string>& trial_result_columns();
void write_trial_results(const std::filesystem::path& path, const std::vector<TrialResult>& rows);
std::vector<TrialResult> read_trial_results(const std::filesystem::path& path);

/// Version string of the source tree this binary was built from.
std::string git_describe();

/// Writes a run manifest: {schema_version, tool, git_describe, command,
/// config, ...extra}. Keys of `extra` are merged at top level.
void write_manifest(const std::filesystem::path& path, const std::string& command, const nlohmann::json& config,
                    const nlohmann::json& extra = nlohmann::json::object());

}  // namespace daml
