#pragma once

// Exact (hard) top-K selection over a ranking vector.
//
// Ordering is largest-first with ties broken toward the lower site index, so
// every function here is deterministic for any input.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace daml {

using TopKMask = std::vector<std::uint8_t>;
using TopKIds = std::vector<std::size_t>;  // ascending site indices

/// 1-based ranks: rank 1 is the largest score.
std::vector<std::size_t> rank(std::span<const double> r);

TopKMask topk_mask(std::span<const double> r, std::size_t k);

TopKIds topk_ids(std::span<const double> r, std::size_t k);

/// Throws ValidationError unless r is non-empty and finite.
void validate_ranking(std::span<const double> r);
/// Throws ValidationError unless 1 <= k <= s.
void validate_k(std::size_t k, std::size_t s);

/// Reusable selector for hot loops. Skips validation and keeps its index
/// buffer between calls; `select` returns ids in unspecified order.
class TopKSelector {
 public:
  std::span<const std::size_t> select(std::span<const double> r, std::size_t k);

 private:
  std::vector<std::size_t> order_;
};

}  // namespace daml
