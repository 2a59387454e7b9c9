#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace daml {

/// Half-open range [begin, end) of period indices.
struct SplitRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end > begin ? end - begin : 0; }
  bool empty() const { return size() == 0; }
};

/// S sites x T periods of non-negative integer counts plus an optional
/// T x S x D feature array. Counts are stored as doubles (integer-valued).
struct PanelDataset {
  std::size_t num_sites = 0;
  std::size_t num_periods = 0;
  std::size_t num_features = 0;
  std::vector<std::string> site_ids;
  std::vector<std::string> feature_names;
  std::vector<double> counts;    // T x S
  std::vector<double> features;  // T x S x D
  SplitRange train;
  SplitRange val;
  SplitRange test;

  PanelDataset() = default;
  PanelDataset(std::size_t sites, std::size_t periods, std::size_t feats = 0);

  std::span<const double> y(std::size_t t) const { return {counts.data() + t * num_sites, num_sites}; }
  std::span<double> y(std::size_t t) { return {counts.data() + t * num_sites, num_sites}; }

  std::span<const double> x(std::size_t t, std::size_t s) const {
    return {features.data() + (t * num_sites + s) * num_features, num_features};
  }
  std::span<double> x(std::size_t t, std::size_t s) {
    return {features.data() + (t * num_sites + s) * num_features, num_features};
  }

  /// Split used for validation; falls back to train when no val periods exist.
  SplitRange val_or_train() const { return val.empty() ? train : val; }
  SplitRange test_or_train() const { return test.empty() ? train : test; }

  /// Checks shapes, non-negative integer counts and ordered disjoint splits.
  void validate() const;
};

}  // namespace daml
