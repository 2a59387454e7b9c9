#pragma once

// The nine-site type A/B/C ranking demo: exact ratio expectation and a
// Monte-Carlo reproduction of the BPR table for the mean and ratio rankings.
//
// Only six sites are random (three Bernoulli type-B, three Bernoulli type-C),
// so a batch of M i.i.d. draws is summarised without loss by the counts of
// its 64 joint outcomes. Batches are drawn as one multinomial over those
// outcomes, which has exactly the distribution of M independent draws and
// makes M = 50000 cheap.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "daml/linalg.hpp"
#include "daml/ranking.hpp"

namespace daml {

inline constexpr std::size_t kAbcOutcomes = 64;

/// Joint outcome o in [0, 64): bit i (i < 3) sets type-B site 4+i to its
/// positive value, bit 3+i sets type-C site 7+i.
Vector abc_outcome(std::size_t o);
double abc_outcome_probability(std::size_t o);

/// Exact E[y / (1 . y)] by enumeration of the 64 joint outcomes.
Vector abc_exact_ratio_expectation();
/// Exact E[y].
Vector abc_exact_mean();

struct AbcDemoOptions {
  std::size_t num_trials = 10000;
  std::size_t num_samples = 50000;  // M per trial
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::vector<std::size_t> ks = {1, 3, 6};
};

struct AbcDemoResult {
  std::vector<std::size_t> ks;
  std::vector<double> mean_bpr;  // per k, averaged over trials
  std::vector<double> ratio_bpr;
  std::vector<double> mean_bpr_se;  // standard error over trials
  std::vector<double> ratio_bpr_se;
  Vector mean_top3_freq;  // per site: fraction of trials in the estimator's top 3
  Vector ratio_top3_freq;
  Vector mean_rank_avg;  // trial-averaged ranking vectors
  Vector ratio_rank_avg;
};

/// Each trial draws an outcome y_true and an independent M-sample batch,
/// ranks with both estimators and scores the top-K of each against y_true.
AbcDemoResult run_abc_demo(const AbcDemoOptions& options);

double abc_expected_bpr(Estimator estimator, std::size_t k, std::size_t num_trials, std::size_t num_samples,
                        std::uint64_t seed, unsigned threads = 1);

void write_abc_demo_csv(const std::filesystem::path& path, const AbcDemoResult& result,
                        const AbcDemoOptions& options);

}  // namespace daml
