#include "daml/topk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "daml/error.hpp"

namespace daml {

namespace {

struct ByScoreThenIndex {
  std::span<const double> r;
  bool operator()(std::size_t a, std::size_t b) const {
    if (r[a] != r[b]) return r[a] > r[b];
    return a < b;
  }
};

}  // namespace

void validate_ranking(std::span<const double> r) {
  if (r.empty()) throw ValidationError("ranking vector is empty");
  for (std::size_t s = 0; s < r.size(); ++s) {
    if (!std::isfinite(r[s])) {
      throw ValidationError("ranking vector entry " + std::to_string(s) + " is not finite");
    }
  }
}

void validate_k(std::size_t k, std::size_t s) {
  if (k < 1 || k > s) {
    throw ValidationError("K must be in [1, " + std::to_string(s) + "], got " + std::to_string(k));
  }
}

std::vector<std::size_t> rank(std::span<const double> r) {
  validate_ranking(r);
  std::vector<std::size_t> order(r.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), ByScoreThenIndex{r});
  std::vector<std::size_t> ranks(r.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) ranks[order[pos]] = pos + 1;
  return ranks;
}

std::span<const std::size_t> TopKSelector::select(std::span<const double> r, std::size_t k) {
  order_.resize(r.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (k < r.size()) {
    std::nth_element(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(k) - 1,
                     order_.end(), ByScoreThenIndex{r});
  }
  return {order_.data(), k};
}

TopKIds topk_ids(std::span<const double> r, std::size_t k) {
  validate_ranking(r);
  validate_k(k, r.size());
  TopKSelector selector;
  auto chosen = selector.select(r, k);
  TopKIds ids(chosen.begin(), chosen.end());
  std::sort(ids.begin(), ids.end());
  return ids;
}

TopKMask topk_mask(std::span<const double> r, std::size_t k) {
  validate_ranking(r);
  validate_k(k, r.size());
  TopKSelector selector;
  TopKMask mask(r.size(), 0);
  for (std::size_t s : selector.select(r, k)) mask[s] = 1;
  return mask;
}

}  // namespace daml
