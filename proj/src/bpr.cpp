#include "daml/bpr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "daml/error.hpp"

namespace daml {

namespace {

// Returns false for a degenerate (zero) denominator after applying policy.
bool check_denominator(double denom, DegeneratePolicy policy) {
  if (denom > 0.0) return true;
  if (policy == DegeneratePolicy::kThrow) {
    throw DegenerateOutcomeError("outcome has no events in its top-K (all-zero denominator)");
  }
  if (policy == DegeneratePolicy::kDefineAsOne)
    warn("BPR denominator is zero (no events in period); treating BPR as 1 and gradient as 0");
  return false;
}

}  // namespace

void BprConfig::validate(std::size_t num_sites) const {
  validate_k(k, num_sites);
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ValidationError("epsilon must lie in [0, 1], got " + std::to_string(epsilon));
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("lambda must be positive, got " + std::to_string(lambda));
  }
}

void validate_outcome(std::span<const double> y) {
  if (y.empty()) throw ValidationError("outcome vector is empty");
  for (std::size_t s = 0; s < y.size(); ++s) {
    if (!std::isfinite(y[s]) || y[s] < 0.0) {
      throw ValidationError("outcome entry " + std::to_string(s) + " must be finite and >= 0");
    }
  }
}

double oracle_topk_sum(std::span<const double> y, std::size_t k) {
  validate_outcome(y);
  validate_k(k, y.size());
  TopKSelector selector;
  double total = 0.0;
  for (std::size_t s : selector.select(y, k)) total += y[s];
  return total;
}

double bpr(std::span<const std::size_t> selection, std::span<const double> y, std::size_t k,
           DegeneratePolicy policy) {
  if (selection.size() != k) {
    throw ValidationError("selection size " + std::to_string(selection.size()) +
                          " does not match K = " + std::to_string(k));
  }
  const double denom = oracle_topk_sum(y, k);
  std::vector<std::uint8_t> seen(y.size(), 0);
  double reached = 0.0;
  for (std::size_t s : selection) {
    if (s >= y.size()) throw ValidationError("selection index out of range: " + std::to_string(s));
    if (seen[s]) throw ValidationError("selection index repeated: " + std::to_string(s));
    seen[s] = 1;
    reached += y[s];
  }
  if (!check_denominator(denom, policy)) return 1.0;
  return reached / denom;
}

double loss_bpr(std::span<const double> r, std::span<const double> y, std::size_t k,
                DegeneratePolicy policy) {
  if (r.size() != y.size()) throw ValidationError("ranking and outcome lengths differ");
  const TopKIds ids = topk_ids(r, k);
  return -bpr(ids, y, k, policy);
}

Vector grad_penalty_wrt_mask(std::span<const double> y, std::size_t k, double g, double lambda,
                             DegeneratePolicy policy) {
  const double denom = oracle_topk_sum(y, k);
  Vector grad(y.size(), 0.0);
  if (!(g > 0.0)) return grad;
  if (!check_denominator(denom, policy)) return grad;
  const double c = -lambda / denom;
  for (std::size_t s = 0; s < y.size(); ++s) grad[s] = c * y[s];
  return grad;
}

}  // namespace daml
