#pragma once

// Score-function (REINFORCE) estimate of the Jacobian of the ratio ranking
// with respect to the model parameters:
//
//   grad_phi r ~= (1/M) sum_m  score_m  outer  y^(m) / (1 . y^(m)),
//   score_m = grad_phi log p_phi(y^(m)),
//
// reusing the draws that produced the ranking. All-zero draws contribute
// nothing, as in ratio_rank. No control variate is applied.

#include <span>

#include "daml/linalg.hpp"

namespace daml {

struct ScoreBatch {
  Matrix samples;  // M x S
  Matrix scores;   // M x P

  void validate() const;
};

/// P x S matrix with entry (p, s) estimating d r_s / d phi_p.
Matrix score_function_grad(const ScoreBatch& batch);

/// grad_r (P x S), jac_b (S x S, entry (a, c) = d b_a / d r_c), grad_b (S).
/// Returns the P-vector dL/dphi_p = sum_{s,a} grad_r(p, s) jac_b(a, s) grad_b(a),
/// i.e. grad_r * (jac_b^T grad_b).
Vector chain_grad_phi(const Matrix& grad_r, const Matrix& jac_b, std::span<const double> grad_b);

/// Fused product score_function_grad(batch) * v without forming the P x S
/// matrix: (1/M) sum_m score_m * (ratio_m . v).
Vector score_function_vjp(const ScoreBatch& batch, std::span<const double> v);

}  // namespace daml
