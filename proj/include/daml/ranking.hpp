#pragma once

// Monte-Carlo ranking estimators over an M x S batch of model draws.
//
//   mean:  r_s = (1/M) sum_m y_s^(m)
//   ratio: r   = (1/M) sum_m y^(m) / (1 . y^(m))
//
// An all-zero draw contributes the zero vector to the ratio estimator
// (0/0 -> 0), so its entries lie in [0, 1] and sum to at most 1.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "daml/bpr.hpp"
#include "daml/linalg.hpp"
#include "daml/models/model.hpp"

namespace daml {

enum class Estimator { kMean, kRatio };

/// Throws ValidationError unless the batch has M >= 1 rows of finite,
/// non-negative entries.
void validate_batch(const Matrix& batch);

Vector mean_rank(const Matrix& batch);
Vector ratio_rank(const Matrix& batch);
Vector rank_scores(Estimator estimator, const Matrix& batch);

/// Row-normalised copy of the batch: out.row(m) = y^(m) / (1 . y^(m)), or
/// zeros for an all-zero row. `out` is resized to match.
void sample_ratios(const Matrix& batch, Matrix& out);

struct BprDistributionOptions {
  std::size_t k = 1;
  std::size_t num_samples = 1000;  // M per trial
  std::size_t num_trials = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  Estimator estimator = Estimator::kRatio;
  DegeneratePolicy policy = DegeneratePolicy::kDefineAsOne;
};

/// BPR of the estimator's top-K against a fixed outcome, one value per
/// trial; each trial draws a fresh M-sample batch from p(y_t). Trial i uses
/// its own RNG stream, so the result is independent of the thread count.
std::vector<double> bpr_distribution(const GenerativeModel& model, std::size_t t,
                                     std::span<const double> y_true,
                                     const BprDistributionOptions& options);

}  // namespace daml
