#include "daml/score_grad.hpp"

#include <cmath>
#include <string>

#include "daml/error.hpp"
#include "daml/kernels.hpp"
#include "daml/ranking.hpp"

namespace daml {

void ScoreBatch::validate() const {
  validate_batch(samples);
  if (scores.rows != samples.rows) {
    throw ValidationError("score batch: " + std::to_string(scores.rows) + " score rows for " +
                          std::to_string(samples.rows) + " samples");
  }
  for (double v : scores.data) {
    if (!std::isfinite(v)) throw ValidationError("score batch: non-finite score entry");
  }
}

Matrix score_function_grad(const ScoreBatch& batch) {
  batch.validate();
  const std::size_t num_params = batch.scores.cols;
  const std::size_t sites = batch.samples.cols;
  Matrix ratios;
  sample_ratios(batch.samples, ratios);
  Matrix grad(num_params, sites);
  for (std::size_t m = 0; m < batch.samples.rows; ++m) {
    auto ratio = ratios.row(m);
    auto score = batch.scores.row(m);
    for (std::size_t p = 0; p < num_params; ++p) {
      if (score[p] != 0.0) kernels::axpy(score[p], ratio, grad.row(p));
    }
  }
  kernels::scale(1.0 / static_cast<double>(batch.samples.rows), grad.data);
  return grad;
}

Vector chain_grad_phi(const Matrix& grad_r, const Matrix& jac_b, std::span<const double> grad_b) {
  const std::size_t sites = grad_r.cols;
  if (jac_b.rows != sites || jac_b.cols != sites || grad_b.size() != sites) {
    throw ValidationError("chain_grad_phi: shapes do not compose (grad_r is " +
                          std::to_string(grad_r.rows) + "x" + std::to_string(grad_r.cols) +
                          ", jac_b is " + std::to_string(jac_b.rows) + "x" +
                          std::to_string(jac_b.cols) + ", grad_b has " +
                          std::to_string(grad_b.size()) + ")");
  }
  Vector dl_dr(sites);
  kernels::active().gemv_t(jac_b.data.data(), sites, sites, grad_b.data(), dl_dr.data());
  Vector out(grad_r.rows);
  kernels::active().gemv(grad_r.data.data(), grad_r.rows, sites, dl_dr.data(), out.data());
  return out;
}

Vector score_function_vjp(const ScoreBatch& batch, std::span<const double> v) {
  batch.validate();
  if (v.size() != batch.samples.cols) throw ValidationError("score_function_vjp: v has wrong length");
  Vector out(batch.scores.cols, 0.0);
  for (std::size_t m = 0; m < batch.samples.rows; ++m) {
    auto y = batch.samples.row(m);
    const double total = kernels::sum(y);
    if (!(total > 0.0)) continue;
    const double coeff = kernels::dot(y, v) / total;
    kernels::axpy(coeff, batch.scores.row(m), out);
  }
  kernels::scale(1.0 / static_cast<double>(batch.samples.rows), out);
  return out;
}

}  // namespace daml
