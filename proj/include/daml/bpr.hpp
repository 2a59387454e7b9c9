#pragma once

// Fraction of best possible reach (BPR) and the penalised loss built on it.
//
// For outcome y and a size-K selection R:
//   BPR(R, y) = sum_{s in R} y_s / sum_{s in TopKIds(y, K)} y_s
// The loss form is -BPR; the constraint value is g = epsilon + loss and the
// penalty is lambda * max(g, 0). g == 0 counts as satisfied.
//
// When every entry of y is zero the denominator vanishes. By default BPR is
// then defined as 1 (any selection reaches all zero events), the mask
// gradient is zero, and a warning is emitted (kDefineAsOneSilent skips the
// warning for callers that report degenerate periods themselves);
// DegeneratePolicy::kThrow raises DegenerateOutcomeError instead.

#include <cstddef>
#include <span>

#include "daml/linalg.hpp"
#include "daml/topk.hpp"

namespace daml {

enum class DegeneratePolicy { kDefineAsOne, kDefineAsOneSilent, kThrow };

struct BprConfig {
  std::size_t k = 1;
  double epsilon = 0.0;
  double lambda = 30.0;

  void validate(std::size_t num_sites) const;
};

/// Throws ValidationError unless y is non-empty, finite, and non-negative.
void validate_outcome(std::span<const double> y);

/// Sum of y over its own top-K sites.
double oracle_topk_sum(std::span<const double> y, std::size_t k);

double bpr(std::span<const std::size_t> selection, std::span<const double> y, std::size_t k,
           DegeneratePolicy policy = DegeneratePolicy::kDefineAsOne);

double loss_bpr(std::span<const double> r, std::span<const double> y, std::size_t k,
                DegeneratePolicy policy = DegeneratePolicy::kDefineAsOne);

inline double constraint_g(double loss, double epsilon) { return epsilon + loss; }

inline double penalty_term(double g, double lambda) { return g > 0.0 ? lambda * g : 0.0; }

/// d(penalty)/d(mask) = -lambda * y / oracle_topk_sum(y) when g > 0, else 0.
Vector grad_penalty_wrt_mask(std::span<const double> y, std::size_t k, double g, double lambda,
                             DegeneratePolicy policy = DegeneratePolicy::kDefineAsOne);

}  // namespace daml
