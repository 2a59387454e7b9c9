#pragma once

// Panel generators, CSV ingestion and feature construction.
//
// Panel CSV layout (UTF-8, header required, '#' lines are comments):
//   site_id,time_index,count[,feature...]
// with one row per (site, time) on a dense grid. time_index is a 0-based
// integer; sites keep their order of first appearance.

#include <cstdint>
#include <filesystem>
#include <string>

#include "daml/panel.hpp"

namespace daml {

/// S = 7 sites, T = 500 periods; site means {10, 20, 30, 40, 50, 60, 100},
/// y = max(0, round(N(mean, 2^2))) i.i.d. over time. Every period is in the
/// training split.
PanelDataset gen_synthetic_1d(std::uint64_t seed);

inline constexpr double kSynthetic1dMeans[] = {10, 20, 30, 40, 50, 60, 100};
inline constexpr double kSynthetic1dSigma = 2.0;

struct NegBinPanelSpec {
  std::size_t num_sites = 12;
  std::size_t num_periods = 60;
  std::size_t num_features = 2;
  double train_fraction = 0.6;
  double val_fraction = 0.2;
};

/// Count panel whose sites mix two regimes: steady sites with moderate
/// negative-binomial counts and bursty sites that are usually zero but
/// occasionally large. A single shared dispersion cannot fit both, so the
/// negative binomial mixed-effects model is misspecified on it. Features
/// are i.i.d. standard normals with a small effect on the mean.
PanelDataset gen_synthetic_negbin(std::uint64_t seed, const NegBinPanelSpec& spec = {});

/// Reads a panel CSV. All periods go to the training split; callers assign
/// splits afterwards. Throws ValidationError with row numbers on bad input.
PanelDataset load_panel_csv(const std::filesystem::path& path);
void write_panel_csv(const std::filesystem::path& path, const PanelDataset& panel);

/// Appends for each k = 1..n_lags a column lag_k = y_{t-k, s} and an
/// indicator lag_k_missing that is 1 where t - k < 0 (the lag is then 0).
inline constexpr std::size_t kDefaultLags = 5;
PanelDataset make_lag_features(const PanelDataset& panel, std::size_t n_lags = kDefaultLags);

/// Standardises every feature column to zero mean and unit variance using
/// training-split statistics. Constant columns are centred only.
void standardize_features(PanelDataset& panel);

/// Splits [0, T) into consecutive train/val/test blocks by fraction.
void assign_splits(PanelDataset& panel, double train_fraction, double val_fraction);

}  // namespace daml
