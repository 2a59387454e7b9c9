#include "daml/ranking.hpp"

#include <cmath>
#include <string>

#include "daml/error.hpp"
#include "daml/kernels.hpp"
#include "daml/parallel.hpp"
#include "daml/rng.hpp"

namespace daml {

void validate_batch(const Matrix& batch) {
  if (batch.rows == 0) throw ValidationError("sample batch is empty (M = 0)");
  if (batch.cols == 0) throw ValidationError("sample batch has no sites");
  for (std::size_t i = 0; i < batch.data.size(); ++i) {
    const double v = batch.data[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("sample batch entry (" + std::to_string(i / batch.cols) + ", " +
                            std::to_string(i % batch.cols) + ") must be finite and >= 0");
    }
  }
}

Vector mean_rank(const Matrix& batch) {
  validate_batch(batch);
  Vector r(batch.cols, 0.0);
  for (std::size_t m = 0; m < batch.rows; ++m) kernels::axpy(1.0, batch.row(m), r);
  kernels::scale(1.0 / static_cast<double>(batch.rows), r);
  return r;
}

Vector ratio_rank(const Matrix& batch) {
  validate_batch(batch);
  Vector r(batch.cols, 0.0);
  for (std::size_t m = 0; m < batch.rows; ++m) {
    const double total = kernels::sum(batch.row(m));
    if (total > 0.0) kernels::axpy(1.0 / total, batch.row(m), r);
  }
  kernels::scale(1.0 / static_cast<double>(batch.rows), r);
  return r;
}

Vector rank_scores(Estimator estimator, const Matrix& batch) {
  return estimator == Estimator::kMean ? mean_rank(batch) : ratio_rank(batch);
}

void sample_ratios(const Matrix& batch, Matrix& out) {
  if (out.rows != batch.rows || out.cols != batch.cols) out = Matrix(batch.rows, batch.cols);
  for (std::size_t m = 0; m < batch.rows; ++m) {
    auto dst = out.row(m);
    const double total = kernels::sum(batch.row(m));
    if (total > 0.0) {
      std::copy(batch.row(m).begin(), batch.row(m).end(), dst.begin());
      kernels::scale(1.0 / total, dst);
    } else {
      std::fill(dst.begin(), dst.end(), 0.0);
    }
  }
}

std::vector<double> bpr_distribution(const GenerativeModel& model, std::size_t t,
                                     std::span<const double> y_true,
                                     const BprDistributionOptions& options) {
  if (options.num_trials == 0) throw ValidationError("bpr_distribution: n_trials must be >= 1");
  if (options.num_samples == 0) throw ValidationError("bpr_distribution: M must be >= 1");
  if (y_true.size() != model.num_sites()) {
    throw ValidationError("bpr_distribution: outcome length does not match model S");
  }
  validate_outcome(y_true);
  validate_k(options.k, y_true.size());
  std::vector<double> out(options.num_trials);
  parallel_for(options.num_trials, options.threads, [&](std::size_t trial) {
    Rng rng = make_rng(options.seed, {stream::kTrial, trial});
    Matrix batch(options.num_samples, model.num_sites());
    model.sample(t, rng, batch);
    const Vector r = rank_scores(options.estimator, batch);
    out[trial] = bpr(topk_ids(r, options.k), y_true, options.k, options.policy);
  });
  return out;
}

}  // namespace daml
